#include "limsup/finite_field.hpp"
#include "limsup/error.hpp"

#include <string>

namespace limsup {

namespace {

using Poly = std::vector<std::uint32_t>; // coefficients over F_p, low degree first

void trim(Poly& f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, std::uint32_t p)
{
    trim(a);
    // m is monic
    while (a.size() >= m.size()) {
        std::uint32_t lead = a.back();
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i)
            a[shift + i] = (a[shift + i] + p * p - lead * m[i] % p) % p;
        trim(a);
    }
    return a;
}

Poly decode(std::uint32_t x, std::uint32_t p, std::uint32_t r)
{
    Poly f(r, 0);
    for (std::uint32_t i = 0; i < r; ++i) {
        f[i] = x % p;
        x /= p;
    }
    trim(f);
    return f;
}

std::uint32_t encode(const Poly& f, std::uint32_t p)
{
    std::uint32_t x = 0;
    for (std::size_t i = f.size(); i-- > 0;)
        x = x * p + f[i];
    return x;
}

bool irreducible(const Poly& f, std::uint32_t p)
{
    std::uint32_t deg = static_cast<std::uint32_t>(f.size() - 1);
    // Try every monic divisor of degree 1..deg/2.
    for (std::uint32_t d = 1; 2 * d <= deg; ++d) {
        std::uint32_t count = 1;
        for (std::uint32_t i = 0; i < d; ++i)
            count *= p;
        for (std::uint32_t low = 0; low < count; ++low) {
            Poly g = decode(low, p, d);
            g.resize(d + 1, 0);
            g[d] = 1;
            if (poly_mod(f, g, p).empty())
                return false;
        }
    }
    return true;
}

} // namespace

bool FiniteField::is_prime_power(std::uint64_t t, std::uint32_t* prime, std::uint32_t* exponent)
{
    if (t < 2)
        return false;
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= t; ++d)
        if (t % d == 0) {
            p = d;
            break;
        }
    if (p == 0)
        p = t;
    std::uint32_t r = 0;
    while (t % p == 0) {
        t /= p;
        ++r;
    }
    if (t != 1)
        return false;
    if (prime)
        *prime = static_cast<std::uint32_t>(p);
    if (exponent)
        *exponent = r;
    return true;
}

FiniteField::FiniteField(std::uint32_t t) : t_(t), p_(0), r_(0)
{
    if (t > 1024 || !is_prime_power(t, &p_, &r_))
        fail(ErrorCode::InvalidArgument, "field size must be a prime power <= 1024, got " + std::to_string(t));

    Poly modulus;
    if (r_ > 1) {
        std::uint32_t count = t_;
        for (std::uint32_t low = 0; low < count; ++low) {
            Poly f = decode(low, p_, r_);
            f.resize(r_ + 1, 0);
            f[r_] = 1;
            if (f[0] != 0 && irreducible(f, p_)) {
                modulus = f;
                break;
            }
        }
    }

    add_.resize(std::size_t(t_) * t_);
    mul_.resize(std::size_t(t_) * t_);
    neg_.resize(t_);
    inv_.assign(t_, 0);
    for (std::uint32_t a = 0; a < t_; ++a) {
        Poly fa = decode(a, p_, r_);
        fa.resize(r_, 0);
        Poly na(r_, 0);
        for (std::uint32_t i = 0; i < r_; ++i)
            na[i] = (p_ - fa[i]) % p_;
        trim(na);
        neg_[a] = static_cast<std::uint16_t>(encode(na, p_));
        for (std::uint32_t b = 0; b < t_; ++b) {
            Poly fb = decode(b, p_, r_);
            fb.resize(r_, 0);
            Poly s(r_, 0);
            for (std::uint32_t i = 0; i < r_; ++i)
                s[i] = (fa[i] + fb[i]) % p_;
            trim(s);
            add_[a * t_ + b] = static_cast<std::uint16_t>(encode(s, p_));
            Poly prod(2 * r_, 0);
            for (std::uint32_t i = 0; i < r_; ++i)
                for (std::uint32_t j = 0; j < r_; ++j)
                    prod[i + j] = (prod[i + j] + fa[i] * fb[j]) % p_;
            if (r_ > 1)
                prod = poly_mod(prod, modulus, p_);
            else
                trim(prod);
            std::uint32_t c = encode(prod, p_);
            mul_[a * t_ + b] = static_cast<std::uint16_t>(c);
            if (c == 1)
                inv_[a] = static_cast<std::uint16_t>(b);
        }
    }
}

std::uint32_t FiniteField::inv(std::uint32_t a) const
{
    require(a != 0 && a < t_, "inverse of zero in finite field");
    return inv_[a];
}

} // namespace limsup
