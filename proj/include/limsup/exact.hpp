#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace limsup {

using Integer = mpz_class;
using Rational = mpq_class;

// Accepts "3/2", "-4", "0.6" (decimals are read exactly as 3/5).
Rational parse_rational(std::string_view text);
std::vector<Rational> parse_rational_list(std::string_view text);
std::string format_rational(const Rational& r);
std::string format_rational_list(const std::vector<Rational>& v);

// num/den in canonical form; the two-argument mpq constructor does not reduce.
inline Rational ratio(long num, long den)
{
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational rational_pow(const Rational& base, long exponent);
Integer integer_pow(std::uint64_t base, unsigned long exponent);
std::int64_t to_int64(const Integer& z);

// Floor of log_base(x) for x > 0 with integer base >= 2, exact.
long floor_log(const Rational& x, std::uint64_t base);

// An exact positive real number prod_i prime_i^{e_i} with rational exponents.
// Factorization is kept canonical, so equality is structural.
class PowerProduct {
public:
    PowerProduct() = default;

    static PowerProduct of(const Rational& positive);
    static PowerProduct of(std::uint64_t positive);
    static PowerProduct power(const Rational& base, const Rational& exponent);

    PowerProduct& operator*=(const PowerProduct& other);
    PowerProduct& operator/=(const PowerProduct& other);
    friend PowerProduct operator*(PowerProduct a, const PowerProduct& b) { return a *= b; }
    friend PowerProduct operator/(PowerProduct a, const PowerProduct& b) { return a /= b; }
    PowerProduct pow(const Rational& exponent) const;
    PowerProduct inverse() const { return pow(Rational(-1)); }

    bool is_one() const { return exps_.empty(); }
    bool is_rational() const;
    Rational to_rational() const; // requires is_rational()
    long double log2() const;
    double to_double() const;

    Integer floor() const;
    Integer ceil() const;
    // floor(r + sign * this) for a rational r and sign in {-1, +1}
    Integer floor_shifted(const Rational& r, int sign) const;

    const std::map<std::uint64_t, Rational>& factors() const { return exps_; }
    std::string to_string() const;

    friend bool operator==(const PowerProduct& a, const PowerProduct& b) { return a.exps_ == b.exps_; }
    friend bool operator!=(const PowerProduct& a, const PowerProduct& b) { return !(a == b); }

private:
    void add(std::uint64_t prime, const Rational& e);
    std::map<std::uint64_t, Rational> exps_;
};

// Exact three-way comparisons.
int compare(const PowerProduct& a, const PowerProduct& b);
int compare(const PowerProduct& a, const Rational& r);
inline int compare(const Rational& r, const PowerProduct& a) { return -compare(a, r); }

inline bool operator<(const PowerProduct& a, const PowerProduct& b) { return compare(a, b) < 0; }
inline bool operator<=(const PowerProduct& a, const PowerProduct& b) { return compare(a, b) <= 0; }
inline bool operator>(const PowerProduct& a, const PowerProduct& b) { return compare(a, b) > 0; }
inline bool operator>=(const PowerProduct& a, const PowerProduct& b) { return compare(a, b) >= 0; }

// Deterministic portable generator (splitmix64 stream).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    std::uint64_t below(std::uint64_t bound); // uniform in [0, bound), bound > 0
    double unit();                            // uniform in [0, 1)

private:
    std::uint64_t state_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace limsup
