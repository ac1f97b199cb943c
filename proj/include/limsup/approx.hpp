#pragma once

#include "limsup/exact.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace limsup {

struct WeightVector {
    std::vector<Rational> v;

    static WeightVector uniform(int length) { return {std::vector<Rational>(static_cast<std::size_t>(length), Rational(1))}; }
    // p-adic mode additionally needs sum of the first m weights = m and the last n equal to 1.
    void validate(int m, int n, bool padic_mode = false) const;
};

enum class FamilyKind { PowerLaw, Tabulated };

// psi_i(q) = q^{-tau_i} (PowerLaw) or psi_i(u_k) = table[i][k] on the schedule u_k = M^k,
// right-constant in between (Tabulated).
struct ApproxSpec {
    int m = 1, n = 1;
    FamilyKind family = FamilyKind::PowerLaw;
    std::vector<Rational> tau;
    std::vector<std::vector<Rational>> table;
    WeightVector weight;
    std::uint64_t M = 2;
    int k_max = 10;

    static ApproxSpec power_law(int m, int n, std::vector<Rational> tau, std::uint64_t M = 2, int k_max = 10);
    void validate() const;

    PowerProduct schedule(int k) const { return PowerProduct::of(M).pow(Rational(k)); }
    PowerProduct psi(int i, std::uint64_t q) const;
    PowerProduct psi_at_schedule(int i, int k) const;
};

// max_i |a_i|^{1/v_i}, kept exact as base^exponent.
struct QuasiNorm {
    std::uint64_t base = 0;
    Rational exponent{1};
    int index = -1; // coordinate achieving the maximum, -1 for the zero vector
    PowerProduct value() const; // requires base > 0
    bool is_zero() const { return base == 0; }
};

QuasiNorm quasi_norm(const std::vector<std::int64_t>& a, const WeightVector& v);

struct RegularityReport {
    bool regular = true;
    int first_failure = -1; // smallest k >= burn_in with f(u_{k+1}) > c f(u_k)
    int burn_in = 0;
};

template <class Value, class Scalar>
RegularityReport check_c_regular(const std::vector<Value>& f, const Scalar& c, int burn_in = 0)
{
    RegularityReport out;
    out.burn_in = burn_in;
    for (std::size_t k = static_cast<std::size_t>(burn_in); k + 1 < f.size(); ++k) {
        if (!(f[k + 1] <= c * f[k])) {
            out.regular = false;
            out.first_failure = static_cast<int>(k);
            break;
        }
    }
    return out;
}

struct SeriesSums {
    bool exact = false;           // true when both sums are exact rationals
    Rational direct, condensed;   // valid when exact
    long double direct_approx = 0, condensed_approx = 0;
};

SeriesSums series_partial_sums(const ApproxSpec& spec, std::uint64_t R);

// Constants [lo, hi] with lo <= direct/condensed <= hi for PowerLaw specs and R >= M.
std::pair<long double, long double> condensation_bounds(const ApproxSpec& spec);

enum class BalanceOutcome { Balanced, FullMeasureShortcut };

struct RhoRow {
    int k = 0;
    PowerProduct u;
    std::vector<PowerProduct> psi, phi, rho;
    PowerProduct target;       // required value of the product of rho
    std::vector<int> order;    // indices by decreasing psi (p-adic)
    int split = -1;            // located j (p-adic)
    int split_solutions = 0;   // number of j satisfying the sandwich (p-adic)
    bool product_ok = false;
    bool dominated = false;
};

struct BalancedRho {
    BalanceOutcome outcome = BalanceOutcome::Balanced;
    int shortcut_k = -1; // schedule index that triggered the shortcut
    int burn_in = 1;     // first schedule index with a row
    std::vector<RhoRow> rows;
    bool certified() const;
};

// Real case, m = 1, n = 2, over the schedule u_k = M^k for k = burn_in..k_max.
BalancedRho balance_rho_real(const ApproxSpec& spec);
// p-adic case, any m, n, over the same schedule.
BalancedRho balance_rho_padic(const ApproxSpec& spec, std::uint64_t p);

// min { v >= 1 : Phi(v) >= u } for a nondecreasing table phi[v-1] = Phi(v).
std::uint64_t inverse_height(const std::vector<Rational>& phi, const Rational& u);

} // namespace limsup
