#include "limsup/lab.hpp"
#include "limsup/error.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace limsup {

PowerProduct psi_at_height(const ApproxSpec& spec, int i, const Rational& height)
{
    require(height > 0, "psi needs a positive height");
    if (spec.family == FamilyKind::PowerLaw)
        return PowerProduct::of(height).pow(-spec.tau[static_cast<std::size_t>(i)]);
    Integer f = height.get_num() / height.get_den();
    std::uint64_t q = f < 1 ? 1 : f.get_ui();
    return spec.psi(i, q);
}

ShellBoundFn shell_bounds_of(const ApproxSpec& spec)
{
    return [spec](const Rational& height) {
        std::vector<PowerProduct> out;
        for (int i = 0; i < spec.n; ++i)
            out.push_back(psi_at_height(spec, i, height));
        return out;
    };
}

namespace {

LinearFormSystem membership_system(const RingDescriptor& ring, int m, int n, const ApproxSpec& spec, const Rational& cap)
{
    require(spec.m == m && spec.n == n, "spec shape does not match the matrix");
    require(cap >= 1, "height cap must be at least 1");
    LinearFormSystem sys;
    sys.ring = ring;
    sys.A.rows = m;
    sys.A.cols = n;
    sys.height_bounds = {PowerProduct::of(cap)};
    sys.shell_bounds = shell_bounds_of(spec);
    if (ring.kind == RingKind::Padic) {
        auto floor_value = PowerProduct::of(ring.p).pow(Rational(-(ring.precision - 2)));
        for (int i = 0; i < n; ++i)
            if (!(psi_at_height(spec, i, cap) > floor_value))
                fail(ErrorCode::PrecisionExhausted, "psi at the height cap is within two digits of the p-adic precision floor");
    }
    return sys;
}

} // namespace

MembershipResult is_member_truncated(const MembershipQuery& query)
{
    query.spec.validate();
    auto sys = membership_system(query.ring, query.X.rows, query.X.cols, query.spec, query.height_cap);
    sys.A = query.X;
    sys.budget = query.budget;
    auto rec = solve(sys, Strategy::FirstFound);
    if (rec.status == SolveStatus::SearchExhausted)
        fail(ErrorCode::BudgetExceeded, "membership search exceeded its budget");
    MembershipResult out;
    out.hit = rec.found();
    if (out.hit)
        out.witness = std::move(rec);
    return out;
}

std::pair<double, double> binomial_interval(std::uint64_t hits, std::uint64_t n)
{
    require(n > 0, "empty sample");
    double p = static_cast<double>(hits) / static_cast<double>(n);
    double half = 1.96 * std::sqrt(p * (1 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

std::vector<ScanRow> measure_scan(const DichotomyScan& scan)
{
    scan.ring.validate();
    require(scan.ring.kind != RingKind::Padic, "dichotomy scans cover the real, complex, quaternion and Laurent rings");
    require(scan.samples >= 100, "dichotomy scans need at least 100 samples");
    require(!scan.specs.empty(), "no specs to scan");
    require(!scan.ladder.empty(), "empty height ladder");
    for (std::size_t i = 0; i < scan.ladder.size(); ++i)
        require(scan.ladder[i] >= 1 && (i == 0 || scan.ladder[i] > scan.ladder[i - 1]), "height ladder must increase");
    const std::uint64_t top = scan.ladder.back();
    for (auto h0 : scan.tail_starts)
        require(h0 >= 1 && h0 <= top, "tail starts must lie within the ladder");

    std::vector<PreparedSearch> searches;
    Integer work(0);
    for (const auto& s : scan.specs) {
        s.spec.validate();
        auto sys = membership_system(scan.ring, s.spec.m, s.spec.n, s.spec, Rational(static_cast<unsigned long>(top)));
        searches.emplace_back(sys);
        work += count_shell(scan.ring, s.spec.m, scan.ring.kind == RingKind::Laurent
                                                     ? Rational(integer_pow(scan.ring.t, static_cast<unsigned long>(
                                                                                               floor_log(Rational(static_cast<unsigned long>(top)), scan.ring.t))))
                                                     : Rational(static_cast<unsigned long>(top)),
                            CountMode::AtMost) /
                2 * static_cast<unsigned long>(scan.samples);
    }
    if (scan.budget && work > Integer(static_cast<unsigned long>(scan.budget)))
        fail(ErrorCode::BudgetExceeded, "dichotomy scan needs about " + work.get_str() + " evaluations, budget is " +
                                            std::to_string(scan.budget));

    std::vector<ScanRow> rows;
    for (std::size_t si = 0; si < scan.specs.size(); ++si) {
        const auto& s = scan.specs[si];
        std::vector<ShellScan> results;
        results.reserve(scan.samples);
        for (std::uint64_t i = 0; i < scan.samples; ++i) {
            Matrix X = sample_uniform(scan.ring, s.spec.m, s.spec.n, derive_seed(scan.seed, i));
            results.push_back(searches[si].scan(X));
        }
        auto emit = [&](const std::string& id, std::uint64_t H, std::uint64_t hits) {
            ScanRow r;
            r.spec_id = id;
            r.H = H;
            r.hits = hits;
            r.N = scan.samples;
            r.fraction = static_cast<double>(hits) / static_cast<double>(scan.samples);
            std::tie(r.ci_lo, r.ci_hi) = binomial_interval(hits, scan.samples);
            rows.push_back(r);
        };
        for (auto H : scan.ladder) {
            std::uint64_t hits = 0;
            for (const auto& r : results)
                hits += r.any && r.first <= static_cast<unsigned long>(H);
            emit(s.id, H, hits);
        }
        for (auto h0 : scan.tail_starts) {
            std::uint64_t hits = 0;
            for (const auto& r : results)
                hits += r.any && r.last >= static_cast<unsigned long>(h0);
            emit(s.id + "/tail", h0, hits);
        }
    }
    return rows;
}

// ---------------------------------------------------------------- box counting

namespace {

// floor(num/den + sign * W) with a long double shortcut away from integers.
std::int64_t floor_shift(std::int64_t num, std::int64_t den, const PowerProduct& W, long double w, int sign)
{
    long double approx = static_cast<long double>(num) / static_cast<long double>(den) + sign * w;
    long double f = std::floor(approx);
    long double frac = approx - f;
    if (frac > 1e-7L && frac < 1 - 1e-7L && std::fabs(approx) < 1e15L)
        return static_cast<std::int64_t>(f);
    return to_int64(W.floor_shifted(ratio(num, den), sign));
}

struct Window {
    std::int64_t lo, hi; // inclusive cell range
};

// Cells [i e, (i+1) e) meeting the open interval (p/q - w, p/q + w), e = 2^-k.
Window cells(std::int64_t p, std::int64_t q, int k, const PowerProduct& W, long double w)
{
    std::int64_t num = p << k;
    std::int64_t lo = floor_shift(num, q, W, w, -1);
    std::int64_t hi = -floor_shift(-num, q, W, w, -1) - 1;
    std::int64_t last = (std::int64_t(1) << k) - 1;
    return {std::max<std::int64_t>(lo, 0), std::min(hi, last)};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double& residual)
{
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    double slope = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (my + slope * (x[i] - mx));
        ss += r * r;
    }
    residual = std::sqrt(ss / static_cast<double>(x.size()));
    return slope;
}

} // namespace

BoxCountEstimate box_count_dimension(const ClosedFormCase& c, std::uint64_t Q, std::vector<int> exponents, std::uint64_t budget)
{
    c.validate_shape();
    require(c.setting == Setting::Real || c.setting == Setting::TwoDim, "box counting covers the real settings");
    require(c.m == 1 && c.n <= 2, "box counting needs m = 1 and n <= 2");
    require(Q >= 1 && Q <= 4096, "layer height out of range");
    const int n = c.n;
    BoxCountEstimate out;
    std::vector<PowerProduct> base_width; // half-width per q is q^(-1-tau_i)
    auto half_width = [&](std::uint64_t q, int i) { return PowerProduct::of(q).pow(-1 - c.tau[std::size_t(i)]); };

    if (exponents.empty()) {
        require(n == 2 && c.tau[0] != c.tau[1], "automatic scales need two distinct exponents");
        int thin = c.tau[0] > c.tau[1] ? 0 : 1, thick = 1 - thin;
        // scales between the longest thin side and the shortest thick side
        long double min_thick = std::log2(2.0L) + half_width(2 * Q, thick).log2();
        long double max_thin = std::log2(2.0L) + half_width(Q, thin).log2();
        int k_lo = static_cast<int>(std::ceil(-min_thick - 1e-12L));
        int k_hi = static_cast<int>(std::floor(-max_thin + 1e-12L));
        while (k_hi - k_lo + 1 < 4)
            ++k_hi;
        for (int k = k_lo; k <= k_hi; ++k)
            exponents.push_back(k);
        out.auto_scales = true;
    }
    require(exponents.size() >= 4, "box counting needs at least four scales");
    for (std::size_t i = 0; i < exponents.size(); ++i)
        require(exponents[i] >= 1 && exponents[i] <= 40 && (i == 0 || exponents[i] > exponents[i - 1]),
                "scale exponents must increase within [1, 40]");

    std::uint64_t rects = 0;
    for (std::uint64_t q = Q; q <= 2 * Q; ++q)
        rects += n == 1 ? q + 1 : (q + 1) * (q + 1);
    out.rectangles = rects;
    if (budget && rects * exponents.size() > budget)
        fail(ErrorCode::BudgetExceeded, "box count needs " + std::to_string(rects * exponents.size()) +
                                            " rectangle-scale tests, budget is " + std::to_string(budget));

    for (int k : exponents) {
        std::vector<std::vector<Window>> per_q_windows;
        std::uint64_t count = 0;
        if (n == 1) {
            std::vector<Window> all;
            for (std::uint64_t q = Q; q <= 2 * Q; ++q) {
                PowerProduct W = half_width(q, 0) * PowerProduct::of(2).pow(Rational(k));
                long double w = std::exp2(W.log2());
                for (std::uint64_t p = 0; p <= q; ++p) {
                    auto win = cells(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q), k, W, w);
                    if (win.lo <= win.hi)
                        all.push_back(win);
                }
            }
            std::sort(all.begin(), all.end(), [](const Window& a, const Window& b) { return a.lo < b.lo; });
            std::int64_t reach = -1;
            for (const auto& w : all) {
                if (w.hi <= reach)
                    continue;
                count += static_cast<std::uint64_t>(w.hi - std::max(reach + 1, w.lo) + 1);
                reach = w.hi;
            }
        } else {
            std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> strips; // column, y range
            for (std::uint64_t q = Q; q <= 2 * Q; ++q) {
                std::array<PowerProduct, 2> W{half_width(q, 0) * PowerProduct::of(2).pow(Rational(k)),
                                              half_width(q, 1) * PowerProduct::of(2).pow(Rational(k))};
                std::array<long double, 2> w{std::exp2(W[0].log2()), std::exp2(W[1].log2())};
                std::vector<Window> xs, ys;
                for (std::uint64_t p = 0; p <= q; ++p) {
                    xs.push_back(cells(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q), k, W[0], w[0]));
                    ys.push_back(cells(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q), k, W[1], w[1]));
                }
                for (const auto& x : xs) {
                    if (x.lo > x.hi)
                        continue;
                    for (const auto& y : ys) {
                        if (y.lo > y.hi)
                            continue;
                        for (std::int64_t col = x.lo; col <= x.hi; ++col)
                            strips.emplace_back(col, y.lo, y.hi);
                        if (strips.size() > (std::size_t(1) << 27))
                            fail(ErrorCode::BudgetExceeded, "box count at 2^-" + std::to_string(k) + " needs too many cells");
                    }
                }
            }
            std::sort(strips.begin(), strips.end());
            std::int64_t col = -1, reach = -1;
            for (const auto& [cx, lo, hi] : strips) {
                if (cx != col) {
                    col = cx;
                    reach = -1;
                }
                if (hi <= reach)
                    continue;
                count += static_cast<std::uint64_t>(hi - std::max(reach + 1, lo) + 1);
                reach = hi;
            }
        }
        out.exponents.push_back(k);
        out.counts.push_back(count);
        out.log_eps.push_back(-k * std::log(2.0));
        out.log_count.push_back(std::log(static_cast<double>(std::max<std::uint64_t>(count, 1))));
    }
    std::vector<double> x;
    for (double le : out.log_eps)
        x.push_back(-le);
    out.slope = fit_slope(x, out.log_count, out.residual);
    return out;
}

// ---------------------------------------------------------------- covering sums

Rational cover_exponent(const ClosedFormCase& c, int j, const Rational& s)
{
    auto T = c.effective_exponents();
    const Rational scale(c.scale());
    Rational e = scale * (c.n + c.m) - 1 + scale * c.n * (c.m - 1) * T[std::size_t(j)] - s * T[std::size_t(j)];
    for (const auto& t : T)
        if (t < T[std::size_t(j)])
            e += scale * (T[std::size_t(j)] - t);
    return e;
}

CoveringResult covering_sum(const ClosedFormCase& c, const Rational& s_lo, const Rational& s_hi, const Rational& step,
                            int max_log2)
{
    c.validate_shape();
    c.require_hypothesis();
    require(s_lo > 0 && s_hi >= s_lo && step > 0, "covering sums need 0 < s_lo <= s_hi and a positive step");
    require(max_log2 >= 4 && max_log2 <= 24, "Q range must be 2^4..2^24");
    CoveringResult out;
    auto T = c.effective_exponents();
    bool first = true;
    for (int j = 0; j < c.n; ++j) {
        // e_j(s) = -1 at s = (e_j(0) + 1) / T_j
        Rational sj = (cover_exponent(c, j, 0) + 1) / T[std::size_t(j)];
        if (first || sj < out.critical)
            out.critical = sj;
        first = false;
    }
    const std::uint64_t top = std::uint64_t(1) << max_log2;
    std::vector<long double> logs(top + 1, 0);
    for (std::uint64_t q = 1; q <= top; ++q)
        logs[q] = std::log(static_cast<long double>(q));
    for (Rational s = s_lo; s <= s_hi; s += step) {
        Rational e;
        for (int j = 0; j < c.n; ++j) {
            Rational ej = cover_exponent(c, j, s);
            if (j == 0 || ej < e)
                e = ej;
        }
        long double ed = static_cast<long double>(e.get_d());
        long double sum = 0, prev_block = 0, last_block = 0, block_start = 0;
        std::uint64_t next = 2;
        for (std::uint64_t q = 1; q <= top; ++q) {
            sum += std::exp(ed * logs[q]);
            if (q == next) {
                out.rows.push_back({s, q, sum});
                prev_block = last_block;
                last_block = sum - block_start;
                block_start = sum;
                next *= 2;
            }
        }
        out.grid.push_back(s);
        bool flat = prev_block > 0 && last_block / prev_block <= 0.98L;
        out.flat.push_back(flat);
        if (flat && !out.first_flat)
            out.first_flat = s;
        if (!flat)
            out.last_growing = s;
    }
    return out;
}

} // namespace limsup
