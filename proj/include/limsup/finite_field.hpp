#pragma once

#include <cstdint>
#include <vector>

namespace limsup {

// F_t for a prime power t <= 1024. Elements are 0..t-1, read as base-p digit
// vectors of polynomials reduced modulo a fixed monic irreducible.
class FiniteField {
public:
    explicit FiniteField(std::uint32_t t);

    std::uint32_t size() const { return t_; }
    std::uint32_t characteristic() const { return p_; }
    std::uint32_t degree() const { return r_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return add_[a * t_ + b]; }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const { return add_[a * t_ + neg_[b]]; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_[a * t_ + b]; }
    std::uint32_t neg(std::uint32_t a) const { return neg_[a]; }
    std::uint32_t inv(std::uint32_t a) const; // a != 0

    static bool is_prime_power(std::uint64_t t, std::uint32_t* prime = nullptr, std::uint32_t* exponent = nullptr);

private:
    std::uint32_t t_, p_, r_;
    std::vector<std::uint16_t> add_, mul_, neg_, inv_;
};

} // namespace limsup
