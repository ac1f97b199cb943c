#include "../unit/generators.hpp"
#include "limsup/approx.hpp"
#include "limsup/dimension.hpp"
#include "limsup/error.hpp"
#include "limsup/experiment.hpp"
#include "limsup/lab.hpp"
#include "limsup/rings.hpp"
#include "limsup/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace limsup;

namespace {

struct Outcome {
    bool pass = true;
    int failures = 0;
    std::string detail;
};

void expect(Outcome& o, bool ok, const std::string& what)
{
    if (ok)
        return;
    o.pass = false;
    if (++o.failures <= 3)
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    else if (o.failures == 4)
        o.detail += "; ...";
}

PowerProduct pp(const Rational& r) { return PowerProduct::of(r); }

Outcome closed_forms()
{
    Outcome o;
    auto value = [](Setting s, int m, int n, std::vector<Rational> tau) { return closed_form({s, m, n, tau}).value; };
    expect(o, value(Setting::Padic, 2, 1, {Rational(4)}) == Rational(7, 4), "p-adic (2,1,4) != 7/4");
    expect(o, value(Setting::TwoDim, 1, 2, {Rational(3), Rational(2)}) == 1, "two-dim (3,2) != 1");
    expect(o, value(Setting::Real, 1, 1, {Rational(2)}) == Rational(2, 3), "real (1,1,2) != 2/3");
    for (long num = 2; num <= 40; ++num) {
        Rational tau(num, 4);
        tau.canonicalize();
        if (tau < 2)
            continue;
        Rational v = value(Setting::Complex, 1, 1, {tau});
        Rational shifted = tau - 1; // the other normalisation of the exponent
        expect(o, v == 4 / tau, "complex value != 4/tau at " + format_rational(tau));
        expect(o, v == 4 / (shifted + 1), "complex value != 4/(tau'+1) at " + format_rational(tau));
    }
    o.detail = o.pass ? "7/4, 1, 2/3, 4/tau = 4/(tau'+1)" : o.detail;
    return o;
}

Outcome cross_validation()
{
    Outcome o;
    Rng rng(20240611);
    int cases = 0, grid_checked = 0;
    for (auto s : {Setting::Real, Setting::Padic, Setting::Complex, Setting::Quaternion, Setting::Laurent}) {
        for (int i = 0; i < 500; ++i) {
            auto c = testgen::random_case(rng, s);
            auto cf = closed_form(c).value;
            auto sel = select_exponents(c);
            auto lower = mtpr_lower_bound(c.problem(sel.a)).value;
            ++cases;
            if (lower != cf) {
                expect(o, false, std::string(setting_name(s)) + " tau=" + format_rational_list(c.tau) + ": " +
                                     format_rational(lower) + " != " + format_rational(cf));
                continue;
            }
            try {
                auto g = grid_optimize_lower_bound(c, 8);
                ++grid_checked;
                expect(o, g.best <= cf, std::string(setting_name(s)) + " grid exceeds the closed form");
            } catch (const Error& e) {
                expect(o, e.code() == ErrorCode::EmptyAdmissibleSet, std::string("grid: ") + e.what());
            }
        }
    }
    if (o.pass)
        o.detail = std::to_string(cases) + " cases equal, " + std::to_string(grid_checked) + " grid optima within bound";
    return o;
}

Outcome certification()
{
    Outcome o;
    struct Run {
        const char* name;
        RingDescriptor ring;
        int m, n;
        std::vector<PowerProduct> err, height;
    };
    const std::vector<Run> runs{
        {"real", RingDescriptor::real(32), 2, 2, {pp(Rational(1, 8))}, {pp(8)}},
        {"complex", RingDescriptor::complex(32), 1, 1, {pp(Rational(1, 6))}, {pp(6)}},
        {"quaternion", RingDescriptor::quaternion(32), 1, 1, {pp(Rational(1, 4))}, {pp(4)}},
        {"laurent", RingDescriptor::laurent(2, 16), 2, 2, {pp(Rational(1, 4))}, {pp(16)}},
        {"padic3", RingDescriptor::padic(3, 20), 1, 1, {PowerProduct::of(3).pow(-5)}, {pp(27)}},
        {"padic5", RingDescriptor::padic(5, 20), 1, 1, {PowerProduct::of(5).pow(-3)}, {pp(25)}},
    };
    std::string counts;
    std::uint64_t seed = 1;
    for (const auto& r : runs) {
        auto rep = certify_minkowski(r.ring, r.m, r.n, r.err, r.height, 200, seed++);
        expect(o, rep.certified(), std::string(r.name) + " " + std::to_string(rep.found) + "/200");
        counts += (counts.empty() ? "" : ", ") + std::string(r.name) + " " + std::to_string(rep.found) + "/200";
    }
    o.detail = o.pass ? counts : o.detail;
    return o;
}

// Independent enumerations.
Integer gaussian_shell(int m, long Q)
{
    long side = 2 * Q + 1;
    long total = 1;
    for (int i = 0; i < 2 * m; ++i)
        total *= side;
    Integer count(0);
    for (long idx = 0; idx < total; ++idx) {
        long rest = idx, sup = 0;
        for (int i = 0; i < 2 * m; ++i) {
            sup = std::max(sup, std::labs(rest % side - Q));
            rest /= side;
        }
        count += sup == Q;
    }
    return count;
}

Integer laurent_shell(std::uint64_t t, int m, int r)
{
    // m polynomials of degree <= r; count those whose largest degree is exactly r
    long per = 1;
    for (int i = 0; i <= r; ++i)
        per *= static_cast<long>(t);
    long total = 1;
    for (int i = 0; i < m; ++i)
        total *= per;
    Integer count(0);
    for (long idx = 0; idx < total; ++idx) {
        long rest = idx;
        bool top = false;
        for (int i = 0; i < m; ++i) {
            long poly = rest % per;
            rest /= per;
            top = top || poly * static_cast<long>(t) >= per; // leading coefficient of X^r is nonzero
        }
        count += top;
    }
    return count;
}

Outcome counting()
{
    Outcome o;
    int checks = 0;
    for (int m = 1; m <= 2; ++m)
        for (long Q = 1; Q <= 5; ++Q) {
            Integer formula = integer_pow(static_cast<std::uint64_t>(2 * Q + 1), static_cast<unsigned long>(2 * m)) -
                              integer_pow(static_cast<std::uint64_t>(2 * Q - 1), static_cast<unsigned long>(2 * m));
            Integer counted = gaussian_shell(m, Q);
            Integer lib = count_shell(RingDescriptor::complex(), m, Rational(Q), CountMode::Exact);
            expect(o, counted == formula && lib == formula, "gaussian m=" + std::to_string(m) + " Q=" + std::to_string(Q));
            if (m == 1)
                expect(o, counted == 8 * Q, "8s law at " + std::to_string(Q));
            ++checks;
        }
    for (std::uint64_t t : {2, 3})
        for (int m = 1; m <= 2; ++m)
            for (int r = 0; r <= 3; ++r) {
                Integer formula = integer_pow(t, static_cast<unsigned long>(m * (r + 1))) -
                                  integer_pow(t, static_cast<unsigned long>(m * r));
                Integer counted = laurent_shell(t, m, r);
                Integer lib = count_shell(RingDescriptor::laurent(t), m, Rational(integer_pow(t, static_cast<unsigned long>(r))),
                                          CountMode::Exact);
                expect(o, counted == formula && lib == formula,
                       "laurent t=" + std::to_string(t) + " m=" + std::to_string(m) + " r=" + std::to_string(r));
                ++checks;
            }
    o.detail = o.pass ? std::to_string(checks) + " shell counts match enumeration" : o.detail;
    return o;
}

Outcome balancing()
{
    Outcome o;
    Rng rng(77);
    int real_rows = 0, padic_rows = 0;
    for (int found = 0; found < 100;) {
        Rational a = testgen::fraction_in(rng, 1, 40, 20), b = testgen::fraction_in(rng, 1, 40, 20);
        auto spec = ApproxSpec::power_law(1, 2, {a, b}, 2 + rng.below(3), 8);
        auto rho = balance_rho_real(spec);
        if (rho.outcome != BalanceOutcome::Balanced)
            continue;
        ++found;
        for (const auto& row : rho.rows) {
            ++real_rows;
            expect(o, row.phi[0] * row.phi[1] == row.u.inverse(), "real product identity");
            for (int i = 0; i < 2; ++i)
                expect(o, row.phi[std::size_t(i)] >= spec.psi_at_schedule(i, row.k), "real domination");
        }
    }
    for (int found = 0; found < 100;) {
        int m = 1 + int(rng.below(2)), n = 1 + int(rng.below(3));
        std::vector<Rational> tau;
        for (int i = 0; i < n; ++i)
            tau.push_back(testgen::fraction_in(rng, 1, 60, 10));
        std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7}[rng.below(4)];
        auto spec = ApproxSpec::power_law(m, n, tau, 2 + rng.below(3), 6);
        auto rho = balance_rho_padic(spec, p);
        if (rho.outcome != BalanceOutcome::Balanced)
            continue;
        ++found;
        PowerProduct pn = PowerProduct::of(p).pow(Rational(-n));
        for (const auto& row : rho.rows) {
            ++padic_rows;
            PowerProduct prod;
            for (const auto& r : row.rho)
                prod *= r;
            expect(o, prod == pn * row.u.pow(Rational(-(m + n))), "p-adic product identity");
            for (int i = 0; i < n; ++i)
                expect(o, row.rho[std::size_t(i)] >= spec.psi_at_schedule(i, row.k) / row.u, "p-adic domination");
            // recount the sandwich psi_(j) >= nu(u, j) > psi_(j+1) over the decreasing order
            std::vector<PowerProduct> sorted;
            for (int i = 0; i < n; ++i)
                sorted.push_back(spec.psi_at_schedule(i, row.k));
            std::sort(sorted.begin(), sorted.end(), [](const PowerProduct& x, const PowerProduct& y) { return y < x; });
            int solutions = 0;
            PowerProduct prefix;
            for (int j = 0; j < n; ++j) {
                if (j)
                    prefix *= sorted[std::size_t(j - 1)];
                PowerProduct nu = (pn * row.u.pow(Rational(-m)) / prefix).pow(Rational(1, n - j));
                solutions += (j == 0 || sorted[std::size_t(j - 1)] >= nu) && nu > sorted[std::size_t(j)];
            }
            expect(o, solutions == 1, "sandwich not unique");
        }
    }
    o.detail = o.pass ? std::to_string(real_rows) + " real and " + std::to_string(padic_rows) + " p-adic schedule rows exact"
                      : o.detail;
    return o;
}

Outcome dichotomy()
{
    Outcome o;
    DichotomyScan scan;
    scan.specs = {{"divergent", ApproxSpec::power_law(1, 2, {Rational(1, 2), Rational(1, 2)})},
                  {"convergent", ApproxSpec::power_law(1, 2, {Rational(3, 5), Rational(3, 5)})}};
    scan.samples = 2000;
    scan.ladder = {16, 64, 256, 1024, 4096};
    scan.tail_starts = {32, 64, 128, 256, 512, 1024, 2048};
    scan.seed = 2024;
    auto rows = measure_scan(scan);
    std::vector<ScanRow> div, tail;
    for (const auto& r : rows) {
        if (r.spec_id == "divergent")
            div.push_back(r);
        if (r.spec_id == "convergent/tail")
            tail.push_back(r);
    }
    for (std::size_t i = 1; i < div.size(); ++i)
        expect(o, div[i - 1].hits <= div[i].hits, "divergent fraction not monotone");
    expect(o, div.back().fraction >= 0.9, "divergent fraction at 4096 below 0.9");
    for (std::size_t i = 1; i < tail.size(); ++i)
        expect(o, tail[i - 1].hits >= tail[i].hits, "convergent tail not decreasing in H0");
    double at512 = 0;
    for (const auto& r : tail)
        if (r.H == 512)
            at512 = r.fraction;
    char buf[160];
    std::snprintf(buf, sizeof buf, "divergent %.4f at 4096, convergent tail %.4f at H0=512 (threshold 0.2)",
                  div.back().fraction, at512);
    expect(o, at512 <= 0.2, buf);
    if (o.pass)
        o.detail = buf;
    return o;
}

Outcome box_count()
{
    Outcome o;
    ClosedFormCase layer{Setting::TwoDim, 1, 2, {Rational(3), Rational(2)}};
    auto est = box_count_dimension(layer, 64, {});
    ClosedFormCase fat{Setting::TwoDim, 1, 2, {Rational(1, 2), Rational(1, 2)}};
    auto cal = box_count_dimension(fat, 64, {3, 4, 5, 6, 7, 8});
    char buf[160];
    std::snprintf(buf, sizeof buf, "layer slope %.4f over 2^-%d..2^-%d (target 1 +/- 0.15), calibration %.4f (2 +/- 0.05)",
                  est.slope, est.exponents.front(), est.exponents.back(), cal.slope);
    expect(o, std::fabs(est.slope - 1) <= 0.15 && std::fabs(cal.slope - 2) <= 0.05, buf);
    o.detail = buf;
    return o;
}

Outcome covering()
{
    Outcome o;
    std::string detail;
    auto check = [&](const ClosedFormCase& c, const Rational& lo, const Rational& hi) {
        auto r = covering_sum(c, lo, hi, Rational(1, 20));
        Rational cf = closed_form(c).value;
        bool ok = r.last_growing && r.first_flat && *r.last_growing <= cf && cf <= *r.first_flat &&
                  *r.first_flat - *r.last_growing <= Rational(1, 20) && r.critical == cf;
        std::string text = std::string(setting_name(c.setting)) + " flip in [" +
                           (r.last_growing ? format_rational(*r.last_growing) : "?") + ", " +
                           (r.first_flat ? format_rational(*r.first_flat) : "?") + "] vs " + format_rational(cf);
        expect(o, ok, text);
        detail += (detail.empty() ? "" : ", ") + text;
    };
    check({Setting::TwoDim, 1, 2, {Rational(3), Rational(2)}}, Rational(1, 2), Rational(3, 2));
    check({Setting::Padic, 2, 1, {Rational(4)}}, Rational(1), Rational(5, 2));
    o.detail = o.pass ? detail : o.detail;
    return o;
}

Outcome determinism()
{
    Outcome o;
    const std::vector<std::string> configs{
        "command=certify\nring=complex@32\nm=1\nn=1\ngamma=1\ntheta=1\ntrials=50\nseed=9\n",
        "command=measure_scan\nm=1\nn=2\nspecs=div:1/2,1/2;conv:3/5,3/5\nsamples=200\nladder=8,64,512\ntail_starts=16,128\nseed=4\n",
        "command=ubiquity\ntau=3/10,9/10\nk=8\nsamples=1000\nseed=5\n",
        "command=solve\nring=real@32\nm=2\nn=2\ngamma=1/4\ntheta=4\nseed=6\nstrategy=min_error\n",
        "command=solve\nring=padic:3@12\nm=1\nn=1\ngamma=1/243\ntheta=27\nseed=7\n",
    };
    for (const auto& text : configs) {
        auto cfg = parse_config(text);
        auto a = run_experiment(cfg), b = run_experiment(cfg);
        bool same = a.artifacts.size() == b.artifacts.size();
        for (std::size_t i = 0; same && i < a.artifacts.size(); ++i)
            same = a.artifacts[i].content == b.artifacts[i].content;
        expect(o, same, std::string(command_name(cfg.command)) + " output differs between runs");
    }
    o.detail = o.pass ? std::to_string(configs.size()) + " seeded commands byte-identical" : o.detail;
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {1, "closed-form equalities", 1, closed_forms},
        {2, "cross-validation of lower bound and closed form", 120, cross_validation},
        {3, "Minkowski certification 200/200 per ring", 300, certification},
        {4, "counting identities", 10, counting},
        {5, "rho-balancing invariants", 30, balancing},
        {6, "dichotomy trend", 600, dichotomy},
        {7, "box-count proxy", 300, box_count},
        {8, "covering-sum transition", 120, covering},
        {9, "determinism", 600, determinism},
    };
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only && c.id != only)
            continue;
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            o.pass = false;
            o.detail += " (runtime over limit)";
        }
        std::printf("%s criterion %d (%s): %s [%.2fs, limit %.0fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.limit_seconds);
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
