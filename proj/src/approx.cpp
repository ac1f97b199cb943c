#include "limsup/approx.hpp"
#include "limsup/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace limsup {

void WeightVector::validate(int m, int n, bool padic_mode) const
{
    require(static_cast<int>(v.size()) == m || static_cast<int>(v.size()) == m + n,
            "weight vector must have length m or m+n");
    for (const auto& w : v)
        require(w > 0, "weights must be positive");
    if (padic_mode) {
        require(static_cast<int>(v.size()) == m + n, "p-adic weights need length m+n");
        Rational head = std::accumulate(v.begin(), v.begin() + m, Rational(0));
        require(head == m, "p-adic weights: the first m must sum to m");
        for (int i = m; i < m + n; ++i)
            require(v[static_cast<std::size_t>(i)] == 1, "p-adic weights: the last n must equal 1");
    }
}

ApproxSpec ApproxSpec::power_law(int m, int n, std::vector<Rational> tau, std::uint64_t M, int k_max)
{
    ApproxSpec s;
    s.m = m;
    s.n = n;
    s.tau = std::move(tau);
    s.M = M;
    s.k_max = k_max;
    s.validate();
    return s;
}

void ApproxSpec::validate() const
{
    require(m >= 1 && n >= 1, "m and n must be positive");
    require(M >= 2, "schedule base M must be >= 2");
    require(k_max >= 1, "schedule needs k_max >= 1");
    if (family == FamilyKind::PowerLaw) {
        require(static_cast<int>(tau.size()) == n, "need n exponents");
        for (const auto& t : tau)
            require(t > 0, "exponents must be positive");
    } else {
        require(static_cast<int>(table.size()) == n, "need n tabulated functions");
        for (const auto& row : table) {
            require(static_cast<int>(row.size()) == k_max + 1, "each table needs k_max+1 samples");
            for (std::size_t k = 0; k < row.size(); ++k) {
                require(row[k] > 0, "tabulated values must be positive");
                require(k == 0 || row[k] <= row[k - 1], "tabulated functions must be nonincreasing");
            }
        }
    }
    if (!weight.v.empty())
        weight.validate(m, n);
}

PowerProduct ApproxSpec::psi(int i, std::uint64_t q) const
{
    if (family == FamilyKind::PowerLaw)
        return PowerProduct::of(q).pow(-tau[static_cast<std::size_t>(i)]);
    const auto& row = table[static_cast<std::size_t>(i)];
    std::size_t k = 0;
    Integer u(1);
    while (k + 1 < row.size() && u * static_cast<unsigned long>(M) <= static_cast<unsigned long>(q)) {
        u *= static_cast<unsigned long>(M);
        ++k;
    }
    return PowerProduct::of(row[k]);
}

PowerProduct ApproxSpec::psi_at_schedule(int i, int k) const
{
    if (family == FamilyKind::PowerLaw)
        return schedule(k).pow(-tau[static_cast<std::size_t>(i)]);
    return PowerProduct::of(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
}

PowerProduct QuasiNorm::value() const
{
    require(base > 0, "quasi-norm of the zero vector has no power form");
    return PowerProduct::power(Rational(static_cast<unsigned long>(base)), exponent);
}

QuasiNorm quasi_norm(const std::vector<std::int64_t>& a, const WeightVector& v)
{
    require(a.size() == v.v.size(), "vector and weight lengths differ");
    QuasiNorm best;
    PowerProduct best_value;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0)
            continue;
        auto mag = static_cast<std::uint64_t>(a[i] < 0 ? -a[i] : a[i]);
        Rational e = 1 / v.v[i];
        PowerProduct value = PowerProduct::power(Rational(static_cast<unsigned long>(mag)), e);
        if (best.index < 0 || value > best_value) {
            best = {mag, e, static_cast<int>(i)};
            best_value = value;
        }
    }
    return best;
}

namespace {

Rational exponent_sum(const ApproxSpec& spec)
{
    return std::accumulate(spec.tau.begin(), spec.tau.end(), Rational(0));
}

long double to_ld(const Rational& r) { return static_cast<long double>(r.get_d()); }

} // namespace

SeriesSums series_partial_sums(const ApproxSpec& spec, std::uint64_t R)
{
    spec.validate();
    require(R >= spec.M, "series needs R >= M");
    SeriesSums out;
    const std::uint64_t exact_limit = std::uint64_t(1) << 14;

    if (spec.family == FamilyKind::PowerLaw) {
        Rational e = spec.m - 1 - exponent_sum(spec);
        long double el = to_ld(e);
        out.exact = e.get_den() == 1 && R <= exact_limit;
        long ei = out.exact ? e.get_num().get_si() : 0;
        for (std::uint64_t r = 1; r <= R; ++r) {
            out.direct_approx += std::pow(static_cast<long double>(r), el);
            if (out.exact)
                out.direct += rational_pow(Rational(static_cast<unsigned long>(r)), ei);
        }
        Integer u(1);
        for (long k = 0; u <= static_cast<unsigned long>(R); ++k, u *= static_cast<unsigned long>(spec.M)) {
            long double ul = static_cast<long double>(u.get_d());
            out.condensed_approx += std::pow(ul, el + 1);
            if (out.exact)
                out.condensed += rational_pow(Rational(u), ei + 1);
        }
        return out;
    }

    out.exact = R <= exact_limit;
    for (std::uint64_t r = 1; r <= R; ++r) {
        Rational term = rational_pow(Rational(static_cast<unsigned long>(r)), spec.m - 1);
        for (int i = 0; i < spec.n; ++i)
            term *= spec.psi(i, r).to_rational();
        out.direct_approx += to_ld(term);
        if (out.exact)
            out.direct += term;
    }
    Integer u(1);
    for (long k = 0; u <= static_cast<unsigned long>(R); ++k, u *= static_cast<unsigned long>(spec.M)) {
        Rational term = rational_pow(Rational(u), spec.m);
        for (int i = 0; i < spec.n; ++i)
            term *= spec.psi(i, u.get_ui()).to_rational();
        out.condensed_approx += to_ld(term);
        if (out.exact)
            out.condensed += term;
    }
    return out;
}

std::pair<long double, long double> condensation_bounds(const ApproxSpec& spec)
{
    require(spec.family == FamilyKind::PowerLaw, "condensation bounds need a power-law spec");
    long double e = to_ld(spec.m - 1 - exponent_sum(spec));
    long double M = static_cast<long double>(spec.M);
    long double Me = std::pow(M, e);
    long double lo = (M - 1) * std::min(1.0L, Me) / (1 + std::pow(M, std::max(0.0L, 1 + e)));
    long double hi = (M - 1) * std::max(1.0L, Me);
    return {lo, hi};
}

bool BalancedRho::certified() const
{
    if (outcome != BalanceOutcome::Balanced)
        return false;
    for (const auto& row : rows)
        if (!row.product_ok || !row.dominated || (!row.order.empty() && row.split_solutions != 1))
            return false;
    return true;
}

namespace {

bool check_domination(RhoRow& row)
{
    for (std::size_t i = 0; i < row.psi.size(); ++i)
        if (row.rho[i] < row.psi[i] / row.u)
            return false;
    return true;
}

// The shortcut applies when the psi product stays saturated at the end of the
// schedule; earlier saturated heights are skipped as burn-in.
template <class Pred>
bool locate_burn_in(BalancedRho& out, int k_max, Pred saturated)
{
    if (saturated(k_max)) {
        out.outcome = BalanceOutcome::FullMeasureShortcut;
        out.shortcut_k = k_max;
        return false;
    }
    out.burn_in = 1;
    for (int k = k_max - 1; k >= 1; --k)
        if (saturated(k)) {
            out.burn_in = k + 1;
            break;
        }
    return true;
}

PowerProduct product(const std::vector<PowerProduct>& v)
{
    PowerProduct out;
    for (const auto& x : v)
        out *= x;
    return out;
}

} // namespace

BalancedRho balance_rho_real(const ApproxSpec& spec)
{
    spec.validate();
    require(spec.m == 1 && spec.n == 2, "real balancing is defined for m = 1, n = 2");
    BalancedRho out;
    auto saturated = [&](int k) {
        return spec.psi_at_schedule(0, k) * spec.psi_at_schedule(1, k) >= spec.schedule(k).inverse();
    };
    if (!locate_burn_in(out, spec.k_max, saturated))
        return out;
    for (int k = out.burn_in; k <= spec.k_max; ++k) {
        RhoRow row;
        row.k = k;
        row.u = spec.schedule(k);
        row.psi = {spec.psi_at_schedule(0, k), spec.psi_at_schedule(1, k)};
        PowerProduct inv = row.u.inverse();
        int l1 = row.psi[1] > row.psi[0] ? 1 : 0;
        int l2 = 1 - l1;
        PowerProduct half = row.u.pow(Rational(-1, 2));
        row.phi.resize(2);
        if (row.psi[l1] > half) {
            row.phi[l1] = row.psi[l1];
            row.phi[l2] = inv / row.psi[l1];
        } else {
            row.phi[0] = row.phi[1] = half;
        }
        for (const auto& f : row.phi)
            row.rho.push_back(f / row.u);
        row.target = row.u.pow(Rational(-3));
        row.product_ok = product(row.rho) == row.target;
        row.dominated = check_domination(row);
        out.rows.push_back(std::move(row));
    }
    return out;
}

BalancedRho balance_rho_padic(const ApproxSpec& spec, std::uint64_t p)
{
    spec.validate();
    const int m = spec.m, n = spec.n;
    BalancedRho out;
    PowerProduct pn = PowerProduct::of(p).pow(Rational(-n));
    auto saturated = [&](int k) {
        PowerProduct prod;
        for (int i = 0; i < n; ++i)
            prod *= spec.psi_at_schedule(i, k);
        return prod >= pn * spec.schedule(k).pow(Rational(-m));
    };
    if (!locate_burn_in(out, spec.k_max, saturated))
        return out;
    for (int k = out.burn_in; k <= spec.k_max; ++k) {
        RhoRow row;
        row.k = k;
        row.u = spec.schedule(k);
        for (int i = 0; i < n; ++i)
            row.psi.push_back(spec.psi_at_schedule(i, k));
        PowerProduct goal = pn * row.u.pow(Rational(-m)); // required product of phi
        row.order.resize(static_cast<std::size_t>(n));
        std::iota(row.order.begin(), row.order.end(), 0);
        std::stable_sort(row.order.begin(), row.order.end(),
                         [&](int a, int b) { return row.psi[static_cast<std::size_t>(a)] > row.psi[static_cast<std::size_t>(b)]; });

        PowerProduct prefix, chosen_nu;
        for (int j = 0; j < n; ++j) {
            if (j > 0)
                prefix *= row.psi[static_cast<std::size_t>(row.order[static_cast<std::size_t>(j - 1)])];
            PowerProduct nu = (goal / prefix).pow(Rational(1, n - j));
            bool upper = j == 0 || row.psi[static_cast<std::size_t>(row.order[static_cast<std::size_t>(j - 1)])] >= nu;
            bool lower = nu > row.psi[static_cast<std::size_t>(row.order[static_cast<std::size_t>(j)])];
            if (upper && lower) {
                if (row.split_solutions++ == 0) {
                    row.split = j;
                    chosen_nu = nu;
                }
            }
        }
        row.phi.assign(static_cast<std::size_t>(n), PowerProduct());
        if (row.split >= 0) {
            for (int i = 0; i < n; ++i) {
                auto idx = static_cast<std::size_t>(row.order[static_cast<std::size_t>(i)]);
                row.phi[idx] = i < row.split ? row.psi[idx] : chosen_nu;
            }
        }
        for (const auto& f : row.phi)
            row.rho.push_back(f / row.u);
        row.target = pn * row.u.pow(Rational(-(m + n)));
        row.product_ok = row.split >= 0 && product(row.rho) == row.target;
        row.dominated = row.split >= 0 && check_domination(row);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::uint64_t inverse_height(const std::vector<Rational>& phi, const Rational& u)
{
    if (phi.empty() || phi.back() < u)
        fail(ErrorCode::OutOfTableRange, "value " + format_rational(u) + " is beyond the tabulated range");
    auto it = std::lower_bound(phi.begin(), phi.end(), u);
    return static_cast<std::uint64_t>(it - phi.begin()) + 1;
}

} // namespace limsup
