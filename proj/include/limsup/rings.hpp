#pragma once

#include "limsup/exact.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace limsup {

class FiniteField;

enum class RingKind { Real, Padic, Complex, Quaternion, Laurent };

const char* ring_kind_name(RingKind kind);

struct RingDescriptor {
    RingKind kind = RingKind::Real;
    std::uint64_t p = 0; // Padic
    std::uint64_t t = 0; // Laurent field size
    int precision = 32;  // bits (Real/Complex/Quaternion) or digits (Padic/Laurent)

    static RingDescriptor real(int bits = 32) { return {RingKind::Real, 0, 0, bits}; }
    static RingDescriptor padic(std::uint64_t p, int digits = 20) { return {RingKind::Padic, p, 0, digits}; }
    static RingDescriptor complex(int bits = 32) { return {RingKind::Complex, 0, 0, bits}; }
    static RingDescriptor quaternion(int bits = 32) { return {RingKind::Quaternion, 0, 0, bits}; }
    static RingDescriptor laurent(std::uint64_t t, int digits = 16) { return {RingKind::Laurent, 0, t, digits}; }

    void validate() const;
    bool archimedean() const { return kind == RingKind::Real || kind == RingKind::Complex || kind == RingKind::Quaternion; }
    int components() const; // real coordinates per element for archimedean kinds
    const FiniteField& field() const; // Laurent only; cached per t
    // "real@32", "padic:5@20", "complex@32", "quaternion@32", "laurent:2@16"
    std::string token() const;
    static RingDescriptor parse_token(const std::string& token);

    friend bool operator==(const RingDescriptor& a, const RingDescriptor& b)
    {
        return a.kind == b.kind && a.p == b.p && a.t == b.t && a.precision == b.precision;
    }
};

// Exact ring integer.
//  Real, Padic: c[0].  Complex: c[0] + c[1] i.
//  Quaternion: doubled coordinates (2a, 2b, 2c, 2d), all of one parity.
//  Laurent: poly[i] is the coefficient of X^i, no trailing zeros.
struct IntegerPoint {
    RingKind kind = RingKind::Real;
    std::array<std::int64_t, 4> c{};
    std::vector<std::uint32_t> poly;

    static IntegerPoint integer(std::int64_t v, RingKind kind = RingKind::Real);
    static IntegerPoint gaussian(std::int64_t re, std::int64_t im);
    static IntegerPoint hurwitz_doubled(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
    static IntegerPoint polynomial(std::vector<std::uint32_t> coeffs);

    bool is_zero() const;
    bool valid() const; // parity / trimming invariants
    friend bool operator==(const IntegerPoint& a, const IntegerPoint& b)
    {
        return a.kind == b.kind && a.c == b.c && a.poly == b.poly;
    }
};

// Approximate ambient value.
//  Real/Complex/Quaternion: c[i] / 2^bits per real coordinate.
//  Padic: digits d_0..d_{L-1}.
//  Laurent: digits = a_1..a_L (coefficients of X^-1..X^-L), poly = polynomial part.
struct AmbientPoint {
    RingKind kind = RingKind::Real;
    int bits = 0;
    std::array<std::int64_t, 4> c{};
    std::vector<std::uint32_t> digits;
    std::vector<std::uint32_t> poly;

    // Nearest fixed-point value of the given real coordinates; ties round up.
    static AmbientPoint from_rationals(const RingDescriptor& ring, const std::vector<Rational>& coords);
    static AmbientPoint padic_digits(std::vector<std::uint32_t> digits);
    static AmbientPoint laurent(std::vector<std::uint32_t> poly, std::vector<std::uint32_t> frac);

    Rational coordinate(int i) const; // archimedean kinds
    friend bool operator==(const AmbientPoint& a, const AmbientPoint& b)
    {
        return a.kind == b.kind && a.bits == b.bits && a.c == b.c && a.digits == b.digits && a.poly == b.poly;
    }
};

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<AmbientPoint> entries; // row-major
    const AmbientPoint& at(int i, int j) const { return entries[std::size_t(i) * cols + j]; }
    AmbientPoint& at(int i, int j) { return entries[std::size_t(i) * cols + j]; }
};

// A norm value; below_floor marks "smaller than the precision floor" for
// truncated kinds, where value then holds the floor itself.
struct NormValue {
    Rational value;
    bool below_floor = false;
};

enum class Metric { Euclidean, Sup };

NormValue abs_value(const AmbientPoint& x, const RingDescriptor& ring);
NormValue dist_to_integers(const AmbientPoint& x, const RingDescriptor& ring);
// Squared Euclidean distance to the nearest Hurwitz integer.
Rational hurwitz_dist2(const AmbientPoint& x);
Rational norm2(const AmbientPoint& x); // squared Euclidean norm, archimedean kinds

std::pair<AmbientPoint, IntegerPoint> reduce(const AmbientPoint& x, const RingDescriptor& ring);
IntegerPoint nearest_hurwitz(const AmbientPoint& x, Metric metric = Metric::Euclidean);

// Nearest Hurwitz integer to c / 2^bits on raw numerators: doubled lattice
// coordinates and the sup distance as a numerator over 2^(bits+1).
struct HurwitzRounding {
    std::array<std::int64_t, 4> z{};
    std::int64_t sup_distance = 0;
};
HurwitzRounding round_hurwitz(const std::array<std::int64_t, 4>& c, int bits, Metric metric);
std::vector<IntegerPoint> hurwitz_units();

// Quaternion arithmetic on doubled integer coordinates: returns doubled product.
IntegerPoint hurwitz_mul(const IntegerPoint& a, const IntegerPoint& b);
IntegerPoint hurwitz_conj(const IntegerPoint& a);
// Exact product of quaternions given as rational coordinates.
std::array<Rational, 4> quaternion_mul(const std::array<Rational, 4>& a, const std::array<Rational, 4>& b);

// p-adic absolute value at L digits; demand_exact throws PrecisionExhausted
// when every retained digit is zero.
NormValue padic_abs(const std::vector<std::uint32_t>& digits, std::uint64_t p, bool demand_exact = false);
NormValue padic_abs(std::int64_t value, std::uint64_t p, int precision, bool demand_exact = false);
std::vector<std::uint32_t> padic_digits_of(std::int64_t value, std::uint64_t p, int precision);

Matrix sample_uniform(const RingDescriptor& ring, int m, int n, std::uint64_t seed);
// Membership of a quaternion in the Voronoi cell of the Hurwitz order.
bool in_hurwitz_cell(const AmbientPoint& x);

enum class CountMode { Exact, AtMost };
Integer count_shell(const RingDescriptor& ring, int m, const Rational& height, CountMode mode);

// Text forms, see README for the grammar.
std::string format_point(const AmbientPoint& x, const RingDescriptor& ring);
AmbientPoint parse_point(const std::string& text, const RingDescriptor& ring);
std::string format_integer(const IntegerPoint& z, const RingDescriptor& ring);
IntegerPoint parse_integer_point(const std::string& text, const RingDescriptor& ring);
std::string format_matrix(const Matrix& a, const RingDescriptor& ring);
std::pair<RingDescriptor, Matrix> parse_matrix(const std::string& text);

} // namespace limsup
