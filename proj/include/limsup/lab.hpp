#pragma once

#include "limsup/approx.hpp"
#include "limsup/dimension.hpp"
#include "limsup/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace limsup {

// psi_i at a shell height (right-constant between integers for tabulated specs).
PowerProduct psi_at_height(const ApproxSpec& spec, int i, const Rational& height);

// Error bounds psi_i(height) for every form, as a solver shell callback.
ShellBoundFn shell_bounds_of(const ApproxSpec& spec);

struct MembershipQuery {
    RingDescriptor ring;
    Matrix X;
    ApproxSpec spec;
    Rational height_cap;
    std::uint64_t budget = 0;
};

struct MembershipResult {
    bool hit = false;
    std::optional<SolutionRecord> witness;
};

// Is there q with 0 < ||q|| <= cap and every |q.X_j - p_j| < psi_j(||q||)?
// Padic: PrecisionExhausted unless psi_j(cap) > p^-(L-2).
MembershipResult is_member_truncated(const MembershipQuery& query);

struct ScanSpec {
    std::string id;
    ApproxSpec spec;
};

struct DichotomyScan {
    RingDescriptor ring = RingDescriptor::real(32);
    std::vector<ScanSpec> specs;
    std::uint64_t samples = 1000;
    std::vector<std::uint64_t> ladder;      // increasing heights
    std::vector<std::uint64_t> tail_starts; // H0 values for tail membership over [H0, max ladder]
    std::uint64_t seed = 1;
    std::uint64_t budget = 0; // candidate evaluations, 0 = no cap
};

struct ScanRow {
    std::string spec_id; // "<id>" for full membership, "<id>/tail" for tails
    std::uint64_t H = 0; // ladder height, or H0 for tail rows
    std::uint64_t hits = 0, N = 0;
    double fraction = 0, ci_lo = 0, ci_hi = 0;
};

// Normal-approximation 95% interval, clamped to [0, 1].
std::pair<double, double> binomial_interval(std::uint64_t hits, std::uint64_t n);

std::vector<ScanRow> measure_scan(const DichotomyScan& scan);

struct BoxCountEstimate {
    std::vector<int> exponents; // eps = 2^-k
    std::vector<std::uint64_t> counts;
    std::vector<double> log_eps, log_count;
    double slope = 0, residual = 0;
    std::uint64_t rectangles = 0;
    bool auto_scales = false;
};

// Boxes of the 2^-k grid on [0,1]^n meeting the layer
// union_{Q <= q <= 2Q} {x : |x_i - p_i/q| < q^(-1-tau_i)} (real, m = 1, n <= 2).
// Empty exponents choose the scales between the two rectangle side lengths.
// budget caps rectangles x scales (BudgetExceeded).
BoxCountEstimate box_count_dimension(const ClosedFormCase& c, std::uint64_t Q, std::vector<int> exponents,
                                     std::uint64_t budget = 0);

struct CoveringRow {
    Rational s;
    std::uint64_t Q = 0;
    long double partial_sum = 0;
};

struct CoveringResult {
    std::vector<CoveringRow> rows;  // dyadic Q per grid exponent
    std::vector<Rational> grid;
    std::vector<bool> flat;         // per grid exponent
    std::optional<Rational> last_growing, first_flat;
    Rational critical;              // exponent where the cheapest cover turns summable
};

// Partial sums of sum_q q^{e(s)} for the cheapest per-layer cover, over s on a
// grid of the given step, with Q = 2^1..2^max_log2.
CoveringResult covering_sum(const ClosedFormCase& c, const Rational& s_lo, const Rational& s_hi, const Rational& step,
                            int max_log2 = 16);

// Per-layer cover exponent e_j(s); the cover at s is summable iff e_j(s) < -1.
Rational cover_exponent(const ClosedFormCase& c, int j, const Rational& s);

} // namespace limsup
