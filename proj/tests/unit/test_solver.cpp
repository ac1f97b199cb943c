#include "generators.hpp"
#include "limsup/error.hpp"
#include "limsup/solver.hpp"

#include <doctest.h>

using namespace limsup;

namespace {

PowerProduct pp(const Rational& r) { return PowerProduct::of(r); }

Matrix real_matrix(int m, int n, const std::vector<Rational>& values, int bits = 32)
{
    Matrix A;
    A.rows = m;
    A.cols = n;
    auto ring = RingDescriptor::real(bits);
    for (const auto& v : values)
        A.entries.push_back(AmbientPoint::from_rationals(ring, {v}));
    return A;
}

LinearFormSystem real_system(const Matrix& A, const Rational& gamma, const Rational& theta)
{
    LinearFormSystem sys;
    sys.ring = RingDescriptor::real(32);
    sys.A = A;
    sys.error_bounds = {pp(gamma)};
    sys.height_bounds = {pp(theta)};
    return sys;
}

// Independent oracle: every q in the box, exact rational distances.
struct Oracle {
    bool any = false;
    Rational min_error;
};

Oracle brute_real(const Matrix& A, const Rational& gamma, long cap)
{
    Oracle o;
    const int m = A.rows, n = A.cols;
    std::vector<long> q(static_cast<std::size_t>(m), -cap);
    while (true) {
        bool nonzero = false;
        for (auto x : q)
            nonzero = nonzero || x != 0;
        if (nonzero) {
            Rational worst(0);
            for (int j = 0; j < n; ++j) {
                Rational s(0);
                for (int k = 0; k < m; ++k)
                    s += Rational(q[std::size_t(k)]) * A.at(k, j).coordinate(0);
                Integer f;
                mpz_fdiv_q(f.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
                Rational d = std::min(Rational(s - f), Rational(f + 1 - s));
                worst = std::max(worst, d);
            }
            if (worst < gamma && (!o.any || worst < o.min_error)) {
                o.any = true;
                o.min_error = worst;
            }
        }
        int k = 0;
        while (k < m && q[std::size_t(k)] == cap)
            q[std::size_t(k++)] = -cap;
        if (k == m)
            break;
        ++q[std::size_t(k)];
    }
    return o;
}

} // namespace

TEST_CASE("golden ratio at Dirichlet bounds")
{
    auto A = real_matrix(1, 1, {parse_rational("1.6180339887")});
    auto sys = real_system(A, Rational(1, 5), 5);
    auto first = solve(sys, Strategy::FirstFound);
    REQUIRE(first.status == SolveStatus::Found);
    CHECK(first.q[0].c[0] == 3);
    CHECK(first.p[0].c[0] == 5);
    CHECK(first.errors[0].value.get_d() == doctest::Approx(0.1459).epsilon(1e-3));

    auto best = solve(sys, Strategy::MinError);
    REQUIRE(best.status == SolveStatus::Found);
    CHECK(best.q[0].c[0] == 5);
    CHECK(best.p[0].c[0] == 8);
    CHECK(best.errors[0].value.get_d() == doctest::Approx(0.0902).epsilon(1e-3));
    CHECK(verify_solution(sys, best));
    CHECK(solve(sys, Strategy::MinHeight).q[0].c[0] == 3);

    auto none = real_system(A, Rational(1, 100), 5);
    CHECK(solve(none, Strategy::FirstFound).status == SolveStatus::CertifiedNone);
    none.budget = 2;
    auto cut = solve(none, Strategy::FirstFound);
    CHECK(cut.status == SolveStatus::SearchExhausted);
    CHECK(cut.examined == 2);
}

TEST_CASE("zero matrix gives the first nonzero integer")
{
    auto A = real_matrix(2, 2, {0, 0, 0, 0});
    auto rec = solve(real_system(A, Rational(1, 10), 3), Strategy::FirstFound);
    REQUIRE(rec.found());
    CHECK(rec.q[0].c[0] == 1);
    CHECK(rec.q[1].c[0] == 0);
    CHECK(rec.p[0].c[0] == 0);
    CHECK(rec.errors[0].value == 0);
    CHECK(rec.height == 1);
}

TEST_CASE("complex (1+i)/2")
{
    LinearFormSystem sys;
    sys.ring = RingDescriptor::complex(32);
    sys.A.rows = sys.A.cols = 1;
    sys.A.entries.push_back(AmbientPoint::from_rationals(sys.ring, {Rational(1, 2), Rational(1, 2)}));
    sys.error_bounds = {pp(Rational(3, 5))};
    sys.height_bounds = {pp(1)};
    auto rec = solve(sys, Strategy::FirstFound);
    REQUIRE(rec.status == SolveStatus::Found);
    CHECK(rec.q[0] == IntegerPoint::gaussian(1, 0));
    CHECK(rec.p[0] == IntegerPoint::gaussian(0, 0));
    CHECK(rec.errors[0].value == Rational(1, 2));
    CHECK(verify_solution(sys, rec));
}

TEST_CASE("solver agrees with brute force on small real systems")
{
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        int m = 1 + static_cast<int>(rng.below(2)), n = 1 + static_cast<int>(rng.below(2));
        auto A = sample_uniform(RingDescriptor::real(20), m, n, rng.next());
        long cap = 1 + static_cast<long>(rng.below(4));
        Rational gamma = testgen::fraction_in(rng, 2, 20, 60);
        LinearFormSystem sys;
        sys.ring = RingDescriptor::real(20);
        sys.A = A;
        sys.error_bounds = {pp(gamma)};
        sys.height_bounds = {pp(cap)};
        auto oracle = brute_real(A, gamma, cap);
        auto first = solve(sys, Strategy::FirstFound);
        auto best = solve(sys, Strategy::MinError);
        CHECK(first.found() == oracle.any);
        CHECK(best.found() == oracle.any);
        if (oracle.any) {
            Rational worst(0);
            for (const auto& e : best.errors)
                worst = std::max(worst, e.value);
            CHECK(worst == oracle.min_error);
            CHECK(verify_solution(sys, first));
            CHECK(verify_solution(sys, best));
        } else {
            CHECK(first.status == SolveStatus::CertifiedNone);
        }
    }
}

TEST_CASE("Dirichlet guarantee for Q = 2..8")
{
    Rng rng(8);
    for (int m = 1; m <= 2; ++m)
        for (int n = 1; n <= 2; ++n)
            for (long Q = 2; Q <= 8; ++Q) {
                LinearFormSystem shape;
                shape.ring = RingDescriptor::real(32);
                shape.A.rows = m;
                shape.A.cols = n;
                shape.error_bounds = {pp(Rational(1, Q))};
                shape.height_bounds = {PowerProduct::power(Q, Rational(n, m))};
                PreparedSearch search(shape);
                for (int trial = 0; trial < 15; ++trial) {
                    auto sys = shape;
                    sys.A = sample_uniform(sys.ring, m, n, rng.next());
                    auto rec = search.solve(sys.A, Strategy::FirstFound);
                    CHECK(rec.status == SolveStatus::Found);
                    CHECK(verify_solution(sys, rec));
                }
            }
}

TEST_CASE("determinism and monotonicity")
{
    Rng rng(12);
    for (int trial = 0; trial < 60; ++trial) {
        auto A = sample_uniform(RingDescriptor::real(24), 1, 2, rng.next());
        Rational gamma = testgen::fraction_in(rng, 1, 10, 40);
        long cap = 2 + static_cast<long>(rng.below(10));
        LinearFormSystem sys;
        sys.ring = RingDescriptor::real(24);
        sys.A = A;
        sys.error_bounds = {pp(gamma)};
        sys.height_bounds = {pp(cap)};
        auto a = solve(sys, Strategy::MinError);
        auto b = solve(sys, Strategy::MinError);
        CHECK(a.q == b.q);
        CHECK(a.p == b.p);
        CHECK(a.examined == b.examined);
        if (a.found()) {
            auto wider = sys;
            wider.error_bounds = {pp(gamma * 2)};
            wider.height_bounds = {pp(cap + 3)};
            CHECK(solve(wider, Strategy::FirstFound).found());
        }
    }
}

TEST_CASE("quasi-norm ordering")
{
    auto A = real_matrix(2, 1, {Rational(1, 3), Rational(1, 7)});
    auto sys = real_system(A, Rational(1, 1000), 30);
    sys.weight = WeightVector{{Rational(3, 2), Rational(1, 2)}};
    auto rec = solve(sys, Strategy::FirstFound);
    REQUIRE(rec.found());
    CHECK(verify_solution(sys, rec));
    REQUIRE(rec.weighted_height.has_value());
    // every exact resonance (3a, 7b) with small weighted height is a candidate; the
    // minimum of max(|3a|^(2/3), |7b|^2) over nonzero pairs is 3^(2/3) at (3, 0)
    CHECK(rec.q[0].c[0] == 3);
    CHECK(rec.q[1].c[0] == 0);
    CHECK(*rec.weighted_height == PowerProduct::power(3, Rational(2, 3)));
}

TEST_CASE("every ring certifies at sound bounds")
{
    auto real = certify_minkowski(RingDescriptor::real(32), 2, 2, {pp(Rational(1, 4))}, {pp(4)}, 40, 5);
    CHECK(real.certified());
    auto cx = certify_minkowski(RingDescriptor::complex(32), 1, 1, {pp(1)}, {pp(1)}, 40, 6);
    CHECK(cx.certified());
    auto quat = certify_minkowski(RingDescriptor::quaternion(24), 1, 1, {pp(Rational(1, 2))}, {pp(2)}, 40, 7);
    CHECK(quat.certified());
    auto laur = certify_minkowski(RingDescriptor::laurent(2, 12), 1, 1, {pp(2)}, {pp(2)}, 40, 8);
    CHECK(laur.certified());
    auto padic = certify_minkowski(RingDescriptor::padic(3, 12), 1, 1, {PowerProduct::of(3).pow(-5)}, {pp(27)}, 40, 9);
    CHECK(padic.certified());
}

TEST_CASE("preconditions")
{
    CHECK_THROWS_AS(certify_minkowski(RingDescriptor::real(32), 1, 1, {pp(Rational(1, 5))}, {pp(4)}, 5, 1), Error);
    auto q = check_minkowski_precondition(RingDescriptor::quaternion(24), 1, 1, {pp(Rational(1, 8))}, {pp(2)},
                                          CertifyPolicy::AsStated);
    CHECK(q.met);
    CHECK_FALSE(check_minkowski_precondition(RingDescriptor::quaternion(24), 1, 1, {pp(Rational(1, 8))}, {pp(2)}).met);
    auto p = check_minkowski_precondition(RingDescriptor::padic(3, 12), 1, 1, {pp(Rational(1, 27))}, {pp(3)},
                                          CertifyPolicy::AsStated);
    CHECK(p.met);
    CHECK_FALSE(check_minkowski_precondition(RingDescriptor::padic(3, 12), 1, 1, {pp(Rational(1, 27))}, {pp(3)}).met);
}

TEST_CASE("quoted thresholds admit failures that the sound ones exclude")
{
    auto quat = certify_minkowski(RingDescriptor::quaternion(24), 1, 1, {pp(Rational(1, 8))}, {pp(2)}, 300, 11,
                                  CertifyPolicy::AsStated);
    CHECK(quat.found < quat.trials);
    auto padic = certify_minkowski(RingDescriptor::padic(3, 12), 1, 1, {pp(Rational(1, 27))}, {pp(3)}, 100, 12,
                                   CertifyPolicy::AsStated);
    CHECK(padic.found < padic.trials);
}

TEST_CASE("p-adic records force a nonzero integer part")
{
    Rng rng(4);
    for (int trial = 0; trial < 60; ++trial) {
        LinearFormSystem sys;
        sys.ring = RingDescriptor::padic(5, 10);
        sys.A = sample_uniform(sys.ring, 2, 1, rng.next());
        sys.error_bounds = {PowerProduct::of(5).pow(-3)};
        sys.height_bounds = {pp(12), pp(12), pp(12)};
        auto rec = solve(sys, Strategy::MinHeight);
        if (!rec.found())
            continue;
        CHECK((rec.q[0].c[0] != 0 || rec.q[1].c[0] != 0));
        CHECK(verify_solution(sys, rec));
        auto first = solve(sys, Strategy::FirstFound);
        CHECK(rec.height <= first.height);
    }
}

TEST_CASE("Laurent solver against direct elimination")
{
    auto ring = RingDescriptor::laurent(2, 10);
    Rng rng(17);
    for (int trial = 0; trial < 80; ++trial) {
        LinearFormSystem sys;
        sys.ring = ring;
        sys.A = sample_uniform(ring, 1, 1, rng.next());
        long d = static_cast<long>(rng.below(4));
        long c = static_cast<long>(rng.below(5));
        sys.height_bounds = {PowerProduct::of(2).pow(Rational(d))};
        sys.error_bounds = {PowerProduct::of(2).pow(Rational(-c))};
        auto rec = solve(sys, Strategy::FirstFound);
        // oracle: coefficients q_0..q_d with the first c fractional digits of qA zero
        const auto& a = sys.A.at(0, 0).digits;
        bool any = false;
        for (unsigned mask = 1; mask < (1u << (d + 1)) && !any; ++mask) {
            bool ok = true;
            for (long i = 1; i <= c && ok; ++i) {
                unsigned bit = 0;
                for (long l = 0; l <= d; ++l)
                    if (mask >> l & 1)
                        bit ^= a[std::size_t(i + l - 1)];
                ok = bit == 0;
            }
            any = ok;
        }
        CHECK(rec.found() == any);
        if (rec.found())
            CHECK(verify_solution(sys, rec));
    }
}

TEST_CASE("quaternion records verify under both multiplications")
{
    Rng rng(21);
    for (bool right : {false, true})
        for (int trial = 0; trial < 30; ++trial) {
            LinearFormSystem sys;
            sys.ring = RingDescriptor::quaternion(20);
            sys.A = sample_uniform(sys.ring, 1, 2, rng.next());
            sys.error_bounds = {pp(Rational(1, 2))};
            sys.height_bounds = {pp(2)};
            sys.right_multiply = right;
            auto rec = solve(sys, Strategy::MinError);
            REQUIRE(rec.found());
            CHECK(rec.q[0].valid());
            CHECK(verify_solution(sys, rec));
        }
}

TEST_CASE("resonant neighbourhood counts")
{
    ResonantQuery on;
    on.ring = RingDescriptor::real(16);
    on.q = {IntegerPoint::integer(3)};
    on.center = real_matrix(1, 1, {Rational(2, 3)}, 16);
    on.radius = Rational(1, 100);
    on.thickening = {0};
    on.height_cap = 10;
    CHECK(enumerate_resonant_neighborhood_hits(on) >= 1);

    Rng rng(5);
    auto cx = RingDescriptor::complex(16);
    for (int trial = 0; trial < 100; ++trial) {
        ResonantQuery q;
        q.ring = cx;
        int m = 1 + static_cast<int>(rng.below(2));
        long top = 0;
        for (int k = 0; k < m; ++k) {
            auto a = static_cast<std::int64_t>(rng.below(11)) - 5, b = static_cast<std::int64_t>(rng.below(11)) - 5;
            if (k == 0 && a == 0 && b == 0)
                a = 1;
            q.q.push_back(IntegerPoint::gaussian(a, b));
            top = std::max({top, static_cast<long>(std::abs(a)), static_cast<long>(std::abs(b))});
        }
        q.center = sample_uniform(cx, m, 1, rng.next());
        q.radius = testgen::fraction_in(rng, 1, 16, 64);
        q.thickening = {q.radius * Rational(static_cast<long>(rng.below(10)), 10)};
        q.height_cap = 1000;
        auto count = enumerate_resonant_neighborhood_hits(q);
        Rational side = 8 * q.radius * m * top + 2;
        CHECK(Rational(count) <= side * side);
    }

    auto padic = RingDescriptor::padic(3, 14);
    for (int trial = 0; trial < 100; ++trial) {
        ResonantQuery q;
        q.ring = padic;
        long lambda = static_cast<long>(rng.below(3));
        std::int64_t scale = 1;
        for (long i = 0; i < lambda; ++i)
            scale *= 3;
        std::int64_t a0 = scale * (1 + static_cast<std::int64_t>(rng.below(20)));
        if (a0 % (scale * 3) == 0)
            a0 += scale;
        q.q = {IntegerPoint::integer(a0, RingKind::Padic)};
        q.center = sample_uniform(padic, 1, 2, rng.next());
        long rexp = 2 + static_cast<long>(rng.below(3));
        q.radius = rational_pow(Rational(3), -rexp);
        q.thickening = {q.radius / 3};
        q.height_cap = static_cast<std::int64_t>(10 + rng.below(400));
        auto count = enumerate_resonant_neighborhood_hits(q);
        Rational one = 1 + Rational(q.height_cap) * q.radius * rational_pow(Rational(3), 1 - lambda);
        CHECK(Rational(count) <= one * one);
    }
}

TEST_CASE("empirical ubiquity")
{
    auto spec = ApproxSpec::power_law(1, 2, {Rational(3, 10), Rational(9, 10)}, 2, 10);
    auto rho = balance_rho_real(spec);
    UbiquityOptions opt;
    opt.k = 10;
    opt.samples = 1500;
    auto rep = empirical_ubiquity_check(spec, rho, opt);
    CHECK(rep.meets(Rational(1, 2)));
    auto again = empirical_ubiquity_check(spec, rho, opt);
    CHECK(again.covered == rep.covered);

    // Dirichlet radii over the full window cover everything
    UbiquityOptions dir = opt;
    dir.full_window = true;
    dir.rho_override = {Rational(1, 16), Rational(1, 16)}; // 2 * (2^10)^(-1/2)
    dir.samples = 500;
    auto full = empirical_ubiquity_check(spec, rho, dir);
    CHECK(full.covered == full.samples);
}
