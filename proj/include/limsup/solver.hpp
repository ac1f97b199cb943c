#pragma once

#include "limsup/approx.hpp"
#include "limsup/rings.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace limsup {

enum class Strategy { FirstFound, MinError, MinHeight };
enum class SolveStatus { Found, CertifiedNone, SearchExhausted };

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);
const char* status_name(SolveStatus s);

// Error bounds as a function of the shell height (membership searches).
using ShellBoundFn = std::function<std::vector<PowerProduct>(const Rational& height)>;

// Find nonzero q with |q_k| <= height_bounds[k] and dist(q.A_j) < error_bounds[j].
//  Padic: a = (a_0, a_1..a_n) in Z^{m+n} with |a_0.X_j + a_j|_p < error_bounds[j];
//         height_bounds holds m caps for a_0 followed by n caps for the companions
//         (a single value broadcasts). Error bounds are quantized to powers of p.
//  Laurent: heights and errors are t^degree; bounds are compared exactly.
// With shell_bounds set, the error bounds are re-evaluated on every shell, and for
// Padic the companions are capped by the shell height instead.
struct LinearFormSystem {
    RingDescriptor ring;
    Matrix A;
    std::vector<PowerProduct> error_bounds;
    std::vector<PowerProduct> height_bounds;
    ShellBoundFn shell_bounds;
    std::optional<WeightVector> weight; // Real only: order candidates by quasi-norm
    bool right_multiply = false;        // Quaternion: A_j q instead of q A_j
    std::uint64_t budget = 0;           // candidates examined before giving up, 0 = no cap

    int m() const { return A.rows; }
    int n() const { return A.cols; }
};

struct SolutionRecord {
    SolveStatus status = SolveStatus::CertifiedNone;
    std::vector<IntegerPoint> q; // Padic: a_0 as m integers
    std::vector<IntegerPoint> p; // Padic: the companions a_1..a_n
    std::vector<NormValue> errors;
    Rational height;             // sup height (Padic: of the whole vector a)
    std::optional<PowerProduct> weighted_height;
    std::uint64_t examined = 0;

    bool found() const { return !q.empty(); }
};

// Shells holding at least one solution, scanning every shell up to the caps.
struct ShellScan {
    bool any = false;
    Rational first, last;
    std::uint64_t hit_shells = 0;
    std::uint64_t examined = 0;
    bool exhausted = false;
};

// Thresholds and shells prepared once and reused across many matrices of the
// same ring and shape.
class PreparedSearch {
public:
    explicit PreparedSearch(const LinearFormSystem& shape);
    SolutionRecord solve(const Matrix& A, Strategy strategy) const;
    ShellScan scan(const Matrix& A) const;

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
};

SolutionRecord solve(const LinearFormSystem& sys, Strategy strategy);

// Recomputes the errors of a record from scratch and checks every bound.
bool verify_solution(const LinearFormSystem& sys, const SolutionRecord& rec);

// Sound: bounds under which the lattice argument holds for the strict
// inequalities and norms used here. AsStated: the product thresholds as
// commonly quoted (not sufficient for every ring, see README).
enum class CertifyPolicy { Sound, AsStated };

struct PreconditionCheck {
    bool met = false;
    std::string detail;
};

PreconditionCheck check_minkowski_precondition(const RingDescriptor& ring, int m, int n,
                                               const std::vector<PowerProduct>& error_bounds,
                                               const std::vector<PowerProduct>& height_bounds,
                                               CertifyPolicy policy = CertifyPolicy::Sound);

struct CertificationReport {
    int trials = 0;
    int found = 0;
    std::uint64_t examined = 0;
    std::vector<int> failures; // trial indices without a solution
    PreconditionCheck precondition;
    bool certified() const { return found == trials; }
};

// Throws PreconditionUnmet unless the policy's condition holds.
CertificationReport certify_minkowski(const RingDescriptor& ring, int m, int n,
                                      const std::vector<PowerProduct>& error_bounds,
                                      const std::vector<PowerProduct>& height_bounds, int trials,
                                      std::uint64_t seed, CertifyPolicy policy = CertifyPolicy::Sound);

// Companion vectors p with |p| <= height_cap whose thickened resonant set
// {X : q.X_j = p_j} meets the sup-norm ball of the given centre and radius.
// Real and Complex: the thickening is a sup-norm distance in each column.
// Padic: ultrametric balls, counting p divisible by p^lambda where
// ||q||_p = p^-lambda, as in the lines-in-balls count.
struct ResonantQuery {
    RingDescriptor ring;
    std::vector<IntegerPoint> q;
    Matrix center;
    Rational radius;
    std::vector<Rational> thickening; // n entries, or one broadcast
    std::int64_t height_cap = 0;
};

Integer enumerate_resonant_neighborhood_hits(const ResonantQuery& query);

// Monte Carlo coverage of a sup-norm ball in [0,1]^2 by the union over q in
// J_k = [M^(k-1), M^k] of {x : |q x_i - p_i| < q * scale * rho_i(M^k)} (real, m = 1, n = 2).
struct UbiquityOptions {
    int k = 1;
    std::vector<Rational> center{Rational(1, 2), Rational(1, 2)};
    Rational radius{1, 4};
    std::uint64_t samples = 4000;
    std::uint64_t seed = 1;
    std::optional<Rational> rho_scale;  // defaults to M
    std::vector<Rational> rho_override; // replaces rho_i(M^k) when nonempty
    bool full_window = false;           // q in [1, M^k] instead of J_k
};

struct UbiquityReport {
    std::uint64_t covered = 0, samples = 0;
    double fraction = 0;
    std::vector<long double> rho;
    std::uint64_t q_lo = 0, q_hi = 0;
    bool meets(const Rational& c) const { return Rational(static_cast<long>(covered)) >= c * static_cast<long>(samples); }
};

UbiquityReport empirical_ubiquity_check(const ApproxSpec& spec, const BalancedRho& rho, const UbiquityOptions& options);

// One CSV row: status,height,q...,p...,errors...
std::string format_solution_csv(const SolutionRecord& rec, const RingDescriptor& ring);
std::string solution_csv_header(int m, int n);

} // namespace limsup
