#include "limsup/exact.hpp"
#include "limsup/error.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace limsup {

const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::UnattainableHeight: return "UnattainableHeight";
    case ErrorCode::OutOfTableRange: return "OutOfTableRange";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::PreconditionUnmet: return "PreconditionUnmet";
    case ErrorCode::EmptyAdmissibleSet: return "EmptyAdmissibleSet";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

Integer parse_integer(std::string_view s)
{
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s))
        fail(ErrorCode::ParseError, "not an integer: '" + std::string(s) + "'");
    Integer z(std::string(s), 10);
    return neg ? Integer(-z) : z;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    auto s = trim(text);
    if (s.empty())
        fail(ErrorCode::ParseError, "empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string_view::npos) {
        Integer num = parse_integer(trim(s.substr(0, slash)));
        auto den_text = trim(s.substr(slash + 1));
        if (!all_digits(den_text))
            fail(ErrorCode::ParseError, "bad denominator in '" + std::string(s) + "'");
        Integer den(std::string(den_text), 10);
        if (den == 0)
            fail(ErrorCode::ParseError, "zero denominator in '" + std::string(s) + "'");
        Rational r(num, den);
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot != std::string_view::npos) {
        bool neg = false;
        auto body = s;
        if (body.front() == '-' || body.front() == '+') {
            neg = body.front() == '-';
            body.remove_prefix(1);
        }
        dot = body.find('.');
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac))
            fail(ErrorCode::ParseError, "bad decimal literal '" + std::string(s) + "'");
        Integer num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        Rational r(neg ? Integer(-num) : num, den);
        r.canonicalize();
        return r;
    }
    return Rational(parse_integer(s));
}

std::vector<Rational> parse_rational_list(std::string_view text)
{
    std::vector<Rational> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::string format_rational(const Rational& r)
{
    if (r.get_den() == 1)
        return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string format_rational_list(const std::vector<Rational>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += format_rational(v[i]);
    }
    return out;
}

Rational rational_pow(const Rational& base, long exponent)
{
    Integer num, den;
    unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
    if (exponent < 0) {
        if (num == 0)
            fail(ErrorCode::InvalidArgument, "zero to a negative power");
        std::swap(num, den);
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Integer integer_pow(std::uint64_t base, unsigned long exponent)
{
    Integer z;
    Integer b;
    mpz_set_ui(b.get_mpz_t(), base);
    mpz_pow_ui(z.get_mpz_t(), b.get_mpz_t(), exponent);
    return z;
}

std::int64_t to_int64(const Integer& z)
{
    if (!mpz_fits_slong_p(z.get_mpz_t()))
        fail(ErrorCode::InvalidArgument, "integer does not fit in 64 bits: " + z.get_str());
    return mpz_get_si(z.get_mpz_t());
}

long floor_log(const Rational& x, std::uint64_t base)
{
    require(x > 0 && base >= 2, "floor_log needs x > 0 and base >= 2");
    long k = 0;
    Rational b(static_cast<unsigned long>(base));
    Rational v = x;
    while (v >= b) {
        v /= b;
        ++k;
    }
    while (v < 1) {
        v *= b;
        --k;
    }
    return k;
}

// ---------------------------------------------------------------- PowerProduct

namespace {

std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    auto take = [&](std::uint64_t p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e)
            out.emplace_back(p, e);
    };
    take(2);
    take(3);
    for (std::uint64_t p = 5; p <= (1u << 22) && p * p <= n; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) {
        Integer z;
        mpz_set_ui(z.get_mpz_t(), n);
        if (n > (std::uint64_t(1) << 44) && mpz_probab_prime_p(z.get_mpz_t(), 30) == 0)
            fail(ErrorCode::InvalidArgument, "base too large to factor: " + z.get_str());
        out.emplace_back(n, 1);
    }
    return out;
}

std::uint64_t to_u64(const Integer& z)
{
    if (z <= 0 || !mpz_fits_ulong_p(z.get_mpz_t()))
        fail(ErrorCode::InvalidArgument, "value out of range for exact power arithmetic: " + z.get_str());
    return mpz_get_ui(z.get_mpz_t());
}

Integer lcm_of_denominators(const std::map<std::uint64_t, Rational>& exps)
{
    Integer d = 1;
    for (const auto& [p, e] : exps)
        mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), e.get_den_mpz_t());
    return d;
}

// (num, den) of prod p^{D e} with integer exponents D e.
std::pair<Integer, Integer> raise_to_integer(const std::map<std::uint64_t, Rational>& exps, const Integer& D)
{
    Integer num = 1, den = 1;
    for (const auto& [p, e] : exps) {
        Rational scaled = e * Rational(D);
        Integer k = scaled.get_num();
        bool neg = k < 0;
        if (neg)
            k = -k;
        if (!mpz_fits_ulong_p(k.get_mpz_t()) || k > 4000000)
            fail(ErrorCode::InvalidArgument, "exponent too large for exact comparison");
        Integer part = integer_pow(p, mpz_get_ui(k.get_mpz_t()));
        if (neg)
            den *= part;
        else
            num *= part;
    }
    return {num, den};
}

long double log2_of(const Rational& r)
{
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
    return std::log2(static_cast<long double>(std::fabs(mn))) - std::log2(static_cast<long double>(md)) +
           static_cast<long double>(en - ed);
}

} // namespace

void PowerProduct::add(std::uint64_t prime, const Rational& e)
{
    if (e == 0)
        return;
    auto [it, inserted] = exps_.emplace(prime, e);
    if (!inserted) {
        it->second += e;
        if (it->second == 0)
            exps_.erase(it);
    }
}

PowerProduct PowerProduct::of(const Rational& positive)
{
    require(positive > 0, "PowerProduct needs a positive value, got " + format_rational(positive));
    PowerProduct out;
    if (positive.get_num() != 1)
        for (auto [p, e] : factor_u64(to_u64(positive.get_num())))
            out.add(p, Rational(e));
    if (positive.get_den() != 1)
        for (auto [p, e] : factor_u64(to_u64(positive.get_den())))
            out.add(p, Rational(-static_cast<long>(e)));
    return out;
}

PowerProduct PowerProduct::of(std::uint64_t positive)
{
    require(positive > 0, "PowerProduct needs a positive value");
    PowerProduct out;
    for (auto [p, e] : factor_u64(positive))
        out.add(p, Rational(e));
    return out;
}

PowerProduct PowerProduct::power(const Rational& base, const Rational& exponent)
{
    return of(base).pow(exponent);
}

PowerProduct& PowerProduct::operator*=(const PowerProduct& other)
{
    for (const auto& [p, e] : other.exps_)
        add(p, e);
    return *this;
}

PowerProduct& PowerProduct::operator/=(const PowerProduct& other)
{
    for (const auto& [p, e] : other.exps_)
        add(p, -e);
    return *this;
}

PowerProduct PowerProduct::pow(const Rational& exponent) const
{
    PowerProduct out;
    if (exponent == 0)
        return out;
    for (const auto& [p, e] : exps_)
        out.exps_.emplace(p, e * exponent);
    return out;
}

bool PowerProduct::is_rational() const
{
    for (const auto& [p, e] : exps_)
        if (e.get_den() != 1)
            return false;
    return true;
}

Rational PowerProduct::to_rational() const
{
    require(is_rational(), "power product is not rational: " + to_string());
    auto [num, den] = raise_to_integer(exps_, Integer(1));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

long double PowerProduct::log2() const
{
    long double s = 0;
    for (const auto& [p, e] : exps_)
        s += static_cast<long double>(e.get_d()) * std::log2(static_cast<long double>(p));
    return s;
}

double PowerProduct::to_double() const { return static_cast<double>(std::exp2(log2())); }

std::string PowerProduct::to_string() const
{
    if (exps_.empty())
        return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, e] : exps_) {
        if (!first)
            os << '*';
        first = false;
        os << p;
        if (e != 1)
            os << "^(" << format_rational(e) << ')';
    }
    return os.str();
}

int compare(const PowerProduct& a, const PowerProduct& b)
{
    PowerProduct d = a / b;
    if (d.is_one())
        return 0;
    long double s = 0, mag = 0;
    for (const auto& [p, e] : d.factors()) {
        long double term = static_cast<long double>(e.get_d()) * std::log2(static_cast<long double>(p));
        s += term;
        mag += std::fabs(term);
    }
    if (std::fabs(s) > 1e-12L * (mag + 1))
        return s > 0 ? 1 : -1;
    // Unique factorization: a nontrivial quotient is never exactly one.
    Integer D = lcm_of_denominators(d.factors());
    auto [num, den] = raise_to_integer(d.factors(), D);
    int c = cmp(num, den);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

int compare(const PowerProduct& a, const Rational& r)
{
    if (r <= 0)
        return 1;
    long double la = a.log2();
    long double lr = log2_of(r);
    long double mag = std::fabs(la) + std::fabs(lr) + 1;
    if (std::fabs(la - lr) > 1e-12L * mag)
        return la > lr ? 1 : -1;
    Integer D = lcm_of_denominators(a.factors());
    auto [num, den] = raise_to_integer(a.factors(), D);
    if (!mpz_fits_ulong_p(D.get_mpz_t()))
        fail(ErrorCode::InvalidArgument, "exponent denominators too large");
    Rational rp = rational_pow(r, static_cast<long>(mpz_get_ui(D.get_mpz_t())));
    Rational lhs(num, den);
    lhs.canonicalize();
    int c = cmp(lhs, rp);
    return c > 0 ? 1 : (c < 0 ? -1 : 0);
}

Integer PowerProduct::floor_shifted(const Rational& r, int sign) const
{
    // Candidate from long double, then exact correction.
    long double approx = static_cast<long double>(r.get_d()) + sign * std::exp2(log2());
    Integer F;
    long double fl = std::floor(approx);
    if (std::fabs(fl) < 9e15L)
        F = static_cast<long>(fl);
    else
        mpz_set_d(F.get_mpz_t(), static_cast<double>(fl));
    // value >= F  <=>  sign * this >= F - r
    auto at_least = [&](const Integer& k) {
        Rational diff = Rational(k) - r;
        if (sign > 0)
            return compare(*this, diff) >= 0;
        // -this >= diff  <=>  this <= -diff
        return compare(*this, Rational(-diff)) <= 0;
    };
    while (!at_least(F))
        F -= 1;
    while (at_least(F + 1))
        F += 1;
    return F;
}

Integer PowerProduct::floor() const { return floor_shifted(Rational(0), 1); }

Integer PowerProduct::ceil() const
{
    Integer f = floor();
    if (compare(*this, Rational(f)) == 0)
        return f;
    return f + 1;
}

// ---------------------------------------------------------------- Rng

std::uint64_t Rng::next()
{
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    require(bound > 0, "Rng::below needs a positive bound");
    std::uint64_t limit = bound * ((~std::uint64_t(0)) / bound);
    for (;;) {
        std::uint64_t x = next();
        if (x < limit)
            return x % bound;
    }
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    Rng r(seed ^ (stream * 0xD1B54A32D192ED03ULL));
    r.next();
    return r.next();
}

} // namespace limsup
