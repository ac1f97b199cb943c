#include "limsup/error.hpp"
#include "limsup/finite_field.hpp"
#include "limsup/rings.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace limsup;

namespace {

RingDescriptor Q8 = RingDescriptor::quaternion(8);

AmbientPoint quat(const std::string& text, const RingDescriptor& ring = Q8) { return parse_point(text, ring); }

// Brute force over every Hurwitz point with doubled coordinates in [-6, 6].
IntegerPoint brute_nearest_hurwitz(const AmbientPoint& x, bool sup)
{
    Rational best_d;
    std::array<std::int64_t, 4> best{};
    bool have = false;
    for (int a = -6; a <= 6; ++a)
        for (int b = -6; b <= 6; ++b)
            for (int c = -6; c <= 6; ++c)
                for (int d = -6; d <= 6; ++d) {
                    std::array<std::int64_t, 4> z{a, b, c, d};
                    if (((a ^ b) & 1) || ((b ^ c) & 1) || ((c ^ d) & 1))
                        continue;
                    Rational dist(0);
                    for (int i = 0; i < 4; ++i) {
                        Rational diff = x.coordinate(i) - ratio(z[i], 2);
                        if (sup)
                            dist = std::max(dist, Rational(abs(diff)));
                        else
                            dist += diff * diff;
                    }
                    if (!have || dist < best_d || (dist == best_d && z < best)) {
                        best_d = dist;
                        best = z;
                        have = true;
                    }
                }
    return IntegerPoint::hurwitz_doubled(best[0], best[1], best[2], best[3]);
}

} // namespace

TEST_CASE("ring tokens round-trip")
{
    for (const char* tok : {"real@32", "padic:5@20", "complex@16", "quaternion@8", "laurent:4@12"})
        CHECK(RingDescriptor::parse_token(tok).token() == tok);
    CHECK_THROWS_AS(RingDescriptor::parse_token("padic:6"), Error);
    CHECK_THROWS_AS(RingDescriptor::parse_token("laurent:6"), Error);
    CHECK_THROWS_AS(RingDescriptor::parse_token("octonion"), Error);
}

TEST_CASE("finite field tables satisfy the field axioms")
{
    for (std::uint32_t t : {2u, 3u, 4u, 8u, 9u, 25u}) {
        FiniteField F(t);
        for (std::uint32_t a = 0; a < t; ++a) {
            CHECK(F.add(a, F.neg(a)) == 0);
            if (a != 0)
                CHECK(F.mul(a, F.inv(a)) == 1);
            for (std::uint32_t b = 0; b < t; ++b) {
                CHECK(F.mul(a, b) == F.mul(b, a));
                for (std::uint32_t c = 0; c < t; c += 3)
                    CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
            }
        }
    }
}

TEST_CASE("reduce: complex componentwise rounding")
{
    auto ring = RingDescriptor::complex(16);
    auto x = AmbientPoint::from_rationals(ring, {Rational(7, 10), Rational(1, 5)});
    auto [frac, z] = reduce(x, ring);
    CHECK(z == IntegerPoint::gaussian(1, 0));
    // 0.7 and 0.2 are rounded to 16 bits; the integer part is exact
    CHECK(frac.coordinate(0) == x.coordinate(0) - 1);
    CHECK(frac.coordinate(1) == x.coordinate(1));
    CHECK(dist_to_integers(x, ring).value == abs_value(frac, ring).value);
}

TEST_CASE("reduce: quaternion picks the half-integer coset")
{
    auto ring = RingDescriptor::quaternion(20);
    auto x = AmbientPoint::from_rationals(ring, {Rational(2, 5), Rational(2, 5), Rational(2, 5), Rational(2, 5)});
    auto [frac, z] = reduce(x, ring);
    CHECK(z == IntegerPoint::hurwitz_doubled(1, 1, 1, 1));
    CHECK(z == brute_nearest_hurwitz(x, false));
    // distance is 0.1 per coordinate, 0.2 in Euclidean norm (up to 20-bit rounding)
    double d2 = hurwitz_dist2(x).get_d();
    CHECK(d2 == doctest::Approx(0.04).epsilon(1e-4));
}

TEST_CASE("reduce: Laurent polynomial part split")
{
    auto ring = RingDescriptor::laurent(2, 4);
    auto x = parse_point("t2:{1,1}[1]", ring);
    auto [frac, z] = reduce(x, ring);
    CHECK(z == IntegerPoint::polynomial({1, 1}));
    CHECK(frac.poly.empty());
    CHECK(abs_value(frac, ring).value == Rational(1, 2));
}

TEST_CASE("nearest_hurwitz agrees with brute force, ties lexicographic")
{
    CHECK(nearest_hurwitz(quat("0,0,0,0")) == IntegerPoint::hurwitz_doubled(0, 0, 0, 0));
    auto half = quat("1/2,0,0,0");
    auto z = nearest_hurwitz(half);
    CHECK(z == brute_nearest_hurwitz(half, false));
    CHECK(hurwitz_dist2(half) == Rational(1, 4));
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Rational> c;
        for (int i = 0; i < 4; ++i)
            c.push_back(ratio(static_cast<long>(rng.below(33)) - 16, 8));
        auto x = AmbientPoint::from_rationals(Q8, c);
        CHECK(nearest_hurwitz(x, Metric::Euclidean) == brute_nearest_hurwitz(x, false));
        CHECK(nearest_hurwitz(x, Metric::Sup) == brute_nearest_hurwitz(x, true));
    }
}

TEST_CASE("nearest_hurwitz never worse than Lipschitz rounding")
{
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Rational> c;
        for (int i = 0; i < 4; ++i)
            c.push_back(ratio(static_cast<long>(rng.below(801)) - 400, 256));
        auto x = AmbientPoint::from_rationals(Q8, c);
        Rational lip(0);
        for (int i = 0; i < 4; ++i) {
            Rational v = x.coordinate(i);
            Integer f;
            Rational shifted = v + Rational(1, 2);
            mpz_fdiv_q(f.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
            Rational d = v - Rational(f);
            lip += d * d;
        }
        CHECK(hurwitz_dist2(x) <= lip);
    }
}

TEST_CASE("Hurwitz units: 24 elements of norm one, closed under products")
{
    auto units = hurwitz_units();
    REQUIRE(units.size() == 24);
    std::set<std::array<std::int64_t, 4>> table;
    for (const auto& u : units) {
        std::int64_t n4 = u.c[0] * u.c[0] + u.c[1] * u.c[1] + u.c[2] * u.c[2] + u.c[3] * u.c[3];
        CHECK(n4 == 4);
        table.insert(u.c);
    }
    for (const auto& u : units)
        for (const auto& v : units)
            CHECK(table.count(hurwitz_mul(u, v).c) == 1);
}

TEST_CASE("quaternion norm is multiplicative and conjugation reverses products")
{
    Rng rng(17);
    auto draw = [&] {
        std::array<Rational, 4> q;
        for (auto& x : q)
            x = ratio(static_cast<long>(rng.below(41)) - 20, 1 + static_cast<long>(rng.below(6)));
        return q;
    };
    auto nrm = [](const std::array<Rational, 4>& q) -> Rational { return q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]; };
    auto conj = [](std::array<Rational, 4> q) {
        for (int i = 1; i < 4; ++i)
            q[i] = -q[i];
        return q;
    };
    for (int trial = 0; trial < 200; ++trial) {
        auto a = draw(), b = draw();
        CHECK(nrm(quaternion_mul(a, b)) == nrm(a) * nrm(b));
        CHECK(conj(quaternion_mul(a, b)) == quaternion_mul(conj(b), conj(a)));
    }
}

TEST_CASE("p-adic absolute value")
{
    CHECK(padic_abs(std::vector<std::uint32_t>{0, 0, 3, 1}, 5).value == Rational(1, 25));
    CHECK(padic_abs(50, 5, 10).value == Rational(1, 25));
    CHECK(padic_abs(7, 5, 10).value == 1);
    auto zero = padic_abs(std::vector<std::uint32_t>{0, 0, 0}, 3);
    CHECK(zero.below_floor);
    CHECK(zero.value == Rational(1, 27));
    CHECK_THROWS_AS(padic_abs(std::vector<std::uint32_t>{0, 0, 0}, 3, true), Error);
    try {
        padic_abs(0, 3, 4, true);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PrecisionExhausted);
    }
}

TEST_CASE("ultrametric inequality for p-adic and Laurent values")
{
    Rng rng(23);
    for (int trial = 0; trial < 400; ++trial) {
        auto x = static_cast<std::int64_t>(rng.below(100000)) - 50000;
        auto y = static_cast<std::int64_t>(rng.below(100000)) - 50000;
        auto ax = padic_abs(x, 3, 16), ay = padic_abs(y, 3, 16), axy = padic_abs(x + y, 3, 16);
        CHECK(axy.value <= std::max(ax.value, ay.value));
        if (ax.value != ay.value && !ax.below_floor && !ay.below_floor)
            CHECK(axy.value == std::max(ax.value, ay.value));
    }
    auto ring = RingDescriptor::laurent(3, 6);
    const auto& F = ring.field();
    for (int trial = 0; trial < 400; ++trial) {
        AmbientPoint x = sample_uniform(ring, 1, 1, 1000 + trial).entries[0];
        AmbientPoint y = sample_uniform(ring, 1, 1, 5000 + trial).entries[0];
        for (std::size_t k = 0; k < 3; ++k) {
            x.digits[k] = 0;
            if (trial % 2)
                y.digits[k] = 0;
        }
        AmbientPoint s = x;
        for (std::size_t k = 0; k < s.digits.size(); ++k)
            s.digits[k] = F.add(x.digits[k], y.digits[k]);
        auto ax = abs_value(x, ring), ay = abs_value(y, ring), as = abs_value(s, ring);
        CHECK(as.value <= std::max(ax.value, ay.value));
        if (ax.value != ay.value)
            CHECK(as.value == std::max(ax.value, ay.value));
    }
}

TEST_CASE("sample_uniform is deterministic and lands in the fundamental domain")
{
    for (auto ring : {RingDescriptor::real(), RingDescriptor::padic(3, 4), RingDescriptor::complex(),
                      RingDescriptor::quaternion(), RingDescriptor::laurent(4, 5)}) {
        auto a = sample_uniform(ring, 2, 3, 99);
        auto b = sample_uniform(ring, 2, 3, 99);
        CHECK(format_matrix(a, ring) == format_matrix(b, ring));
    }
    auto ring = RingDescriptor::quaternion(16);
    auto a = sample_uniform(ring, 10, 10, 3);
    for (const auto& x : a.entries) {
        CHECK(in_hurwitz_cell(x));
        CHECK(hurwitz_dist2(x) == norm2(x));
    }
}

TEST_CASE("p-adic digit frequencies are uniform")
{
    auto ring = RingDescriptor::padic(3, 4);
    auto a = sample_uniform(ring, 250, 100, 7); // 25000 entries, 100000 digits
    std::array<long, 3> freq{};
    for (const auto& x : a.entries)
        for (auto d : x.digits)
            ++freq[d];
    const double n = 100000, p = 1.0 / 3, sigma = std::sqrt(n * p * (1 - p));
    for (long f : freq)
        CHECK(std::abs(f - n * p) < 3 * sigma);
}

namespace {

// Brute-force shell counts for the archimedean and p-adic kinds with m <= 2.
long brute_count(RingKind kind, int m, int Q, bool exact)
{
    int comps = kind == RingKind::Complex ? 2 * m : m;
    long count = 0;
    std::vector<int> v(static_cast<std::size_t>(comps), -Q);
    for (;;) {
        int h = 0;
        for (int x : v)
            h = std::max(h, std::abs(x));
        if (exact ? h == Q : h <= Q)
            ++count;
        std::size_t i = 0;
        while (i < v.size() && v[i] == Q)
            v[i++] = -Q;
        if (i == v.size())
            break;
        ++v[i];
    }
    return count;
}

long brute_hurwitz(int m, int D, bool exact)
{
    // elements with doubled sup norm D (exact) or <= D
    long single_exact = 0, single_atmost = 0;
    std::vector<long> by_height(static_cast<std::size_t>(D + 1), 0);
    for (int a = -D; a <= D; ++a)
        for (int b = -D; b <= D; ++b)
            for (int c = -D; c <= D; ++c)
                for (int d = -D; d <= D; ++d) {
                    if (((a ^ b) & 1) || ((b ^ c) & 1) || ((c ^ d) & 1))
                        continue;
                    int h = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
                    ++by_height[static_cast<std::size_t>(h)];
                }
    for (int h = 0; h <= D; ++h)
        single_atmost += by_height[static_cast<std::size_t>(h)];
    single_exact = by_height[static_cast<std::size_t>(D)];
    long below = single_atmost - single_exact;
    long atmost = 1, under = 1;
    for (int i = 0; i < m; ++i) {
        atmost *= single_atmost;
        under *= below;
    }
    return exact ? atmost - under : atmost;
}

long brute_laurent(std::uint64_t t, int m, int r, bool exact)
{
    // polynomials of degree <= r: t^(r+1) each; count vectors of m with max degree == r or <= r
    long per = 1;
    for (int i = 0; i <= r; ++i)
        per *= static_cast<long>(t);
    long lower = per / static_cast<long>(t);
    long atmost = 1, under = 1;
    for (int i = 0; i < m; ++i) {
        atmost *= per;
        under *= lower;
    }
    return exact ? atmost - under : atmost;
}

} // namespace

TEST_CASE("count_shell closed forms match enumeration")
{
    CHECK(count_shell(RingDescriptor::complex(), 1, 2, CountMode::Exact) == 16);
    CHECK(count_shell(RingDescriptor::laurent(2), 1, 4, CountMode::Exact) == 4);
    CHECK(count_shell(RingDescriptor::real(), 1, 3, CountMode::Exact) == 2);
    for (int m = 1; m <= 2; ++m)
        for (int Q = 0; Q <= 4; ++Q) {
            for (auto kind : {RingKind::Real, RingKind::Complex}) {
                RingDescriptor ring = kind == RingKind::Real ? RingDescriptor::real() : RingDescriptor::complex();
                CHECK(count_shell(ring, m, Q, CountMode::Exact) == brute_count(kind, m, Q, true));
                CHECK(count_shell(ring, m, Q, CountMode::AtMost) == brute_count(kind, m, Q, false));
            }
            CHECK(count_shell(RingDescriptor::padic(3), m, Q, CountMode::Exact) == brute_count(RingKind::Real, m, Q, true));
            for (int D = 0; D <= 4; ++D) {
                CHECK(count_shell(RingDescriptor::quaternion(), m, ratio(D, 2), CountMode::Exact) == brute_hurwitz(m, D, true));
                CHECK(count_shell(RingDescriptor::quaternion(), m, ratio(D, 2), CountMode::AtMost) == brute_hurwitz(m, D, false));
            }
        }
    for (std::uint64_t t : {2u, 3u})
        for (int m = 1; m <= 2; ++m)
            for (int r = 0; r <= 3; ++r) {
                Rational h(integer_pow(t, static_cast<unsigned long>(r)));
                CHECK(count_shell(RingDescriptor::laurent(t), m, h, CountMode::Exact) == brute_laurent(t, m, r, true));
                CHECK(count_shell(RingDescriptor::laurent(t), m, h, CountMode::AtMost) == brute_laurent(t, m, r, false));
            }
    for (int s = 1; s <= 5; ++s)
        CHECK(count_shell(RingDescriptor::complex(), 1, s, CountMode::Exact) == 8 * s);
    CHECK_THROWS_AS(count_shell(RingDescriptor::laurent(2), 1, 3, CountMode::Exact), Error);
    CHECK_THROWS_AS(count_shell(RingDescriptor::real(), 1, Rational(1, 2), CountMode::Exact), Error);
}

TEST_CASE("exact shells sum to the at-most count")
{
    for (int m = 1; m <= 2; ++m)
        for (int Q = 0; Q <= 4; ++Q) {
            Integer sum(0);
            for (int h = 0; h <= Q; ++h)
                sum += count_shell(RingDescriptor::complex(), m, h, CountMode::Exact);
            CHECK(sum == count_shell(RingDescriptor::complex(), m, Q, CountMode::AtMost));
        }
}

TEST_CASE("text forms round-trip")
{
    auto real = RingDescriptor::real(8);
    CHECK(format_point(parse_point("3/8", real), real) == "3/8");
    auto cx = RingDescriptor::complex(8);
    CHECK(format_point(parse_point("3/8+1/2i", cx), cx) == "3/8+1/2i");
    CHECK(format_point(parse_point("-3/8-1/2i", cx), cx) == "-3/8-1/2i");
    CHECK(format_point(parse_point("1/2,1/2,1/2,1/2", Q8), Q8) == "1/2,1/2,1/2,1/2");
    auto pa = RingDescriptor::padic(5, 4);
    CHECK(format_point(parse_point("p5:0,0,3,1", pa), pa) == "p5:0,0,3,1");
    auto la = RingDescriptor::laurent(2, 3);
    CHECK(format_point(parse_point("t2:[1,0,1]", la), la) == "t2:[1,0,1]");
    CHECK(format_point(parse_point("t2:{1,1}[1,0,0]", la), la) == "t2:{1,1}[1,0,0]");
    CHECK(format_integer(parse_integer_point("3-2i", cx), cx) == "3-2i");
    CHECK(format_integer(parse_integer_point("1/2,-1/2,1/2,1/2", Q8), Q8) == "1/2,-1/2,1/2,1/2");
    CHECK_THROWS_AS(parse_integer_point("1/2,0,0,0", Q8), Error);
    CHECK_THROWS_AS(parse_point("p3:0,1", pa), Error);

    auto m = sample_uniform(RingDescriptor::complex(12), 2, 2, 4);
    auto text = format_matrix(m, RingDescriptor::complex(12));
    auto [ring, back] = parse_matrix(text);
    CHECK(ring == RingDescriptor::complex(12));
    CHECK(format_matrix(back, ring) == text);
}
