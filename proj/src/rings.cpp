#include "limsup/rings.hpp"
#include "limsup/error.hpp"
#include "limsup/finite_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace limsup {

const char* ring_kind_name(RingKind kind)
{
    switch (kind) {
    case RingKind::Real: return "real";
    case RingKind::Padic: return "padic";
    case RingKind::Complex: return "complex";
    case RingKind::Quaternion: return "quaternion";
    case RingKind::Laurent: return "laurent";
    }
    return "?";
}

namespace {

bool is_prime(std::uint64_t p)
{
    if (p < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

// Nearest multiple of m to y; ties go to the smaller multiple.
std::int64_t nearest_multiple(std::int64_t y, std::int64_t m)
{
    std::int64_t q = floor_div(y, m);
    std::int64_t r = y - q * m;
    if (2 * r > m)
        ++q;
    return q;
}

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

Rational dyadic(std::int64_t num, int bits)
{
    Rational r(Integer(static_cast<long>(num)), integer_pow(2, static_cast<unsigned long>(bits)));
    r.canonicalize();
    return r;
}

std::string trim_copy(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim_copy(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim_copy(cur));
    return out;
}

std::vector<std::uint32_t> parse_digit_list(const std::string& s, std::uint64_t bound)
{
    std::vector<std::uint32_t> out;
    if (trim_copy(s).empty())
        return out;
    for (const auto& piece : split(s, ',')) {
        Rational r = parse_rational(piece);
        if (r.get_den() != 1 || r < 0 || r >= Rational(static_cast<unsigned long>(bound)))
            fail(ErrorCode::ParseError, "digit out of range: '" + piece + "'");
        out.push_back(static_cast<std::uint32_t>(r.get_num().get_ui()));
    }
    return out;
}

std::string join_digits(const std::vector<std::uint32_t>& d)
{
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(d[i]);
    }
    return out;
}

void trim_poly(std::vector<std::uint32_t>& f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

} // namespace

// ---------------------------------------------------------------- descriptor

void RingDescriptor::validate() const
{
    switch (kind) {
    case RingKind::Real:
    case RingKind::Complex:
    case RingKind::Quaternion:
        require(precision >= 1 && precision <= 40, "fixed-point precision must be in [1, 40] bits");
        break;
    case RingKind::Padic: {
        require(is_prime(p), "p-adic ring needs a prime p, got " + std::to_string(p));
        require(precision >= 1, "p-adic precision must be >= 1");
        long double bits = precision * std::log2(static_cast<long double>(p));
        require(bits < 62, "p^L must stay below 2^62");
        break;
    }
    case RingKind::Laurent:
        require(FiniteField::is_prime_power(t) && t <= 1024, "Laurent ring needs a prime power t <= 1024");
        require(precision >= 1 && precision <= 4096, "Laurent precision must be in [1, 4096]");
        break;
    }
}

int RingDescriptor::components() const
{
    switch (kind) {
    case RingKind::Complex: return 2;
    case RingKind::Quaternion: return 4;
    default: return 1;
    }
}

const FiniteField& RingDescriptor::field() const
{
    require(kind == RingKind::Laurent, "field() is only defined for Laurent rings");
    static std::mutex mu;
    static std::map<std::uint64_t, std::unique_ptr<FiniteField>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[t];
    if (!slot)
        slot = std::make_unique<FiniteField>(static_cast<std::uint32_t>(t));
    return *slot;
}

std::string RingDescriptor::token() const
{
    std::string out = ring_kind_name(kind);
    if (kind == RingKind::Padic)
        out += ":" + std::to_string(p);
    if (kind == RingKind::Laurent)
        out += ":" + std::to_string(t);
    out += "@" + std::to_string(precision);
    return out;
}

RingDescriptor RingDescriptor::parse_token(const std::string& token)
{
    std::string s = trim_copy(token);
    int precision = -1;
    auto at = s.find('@');
    if (at != std::string::npos) {
        Rational r = parse_rational(s.substr(at + 1));
        if (r.get_den() != 1 || r <= 0)
            fail(ErrorCode::ParseError, "bad precision in ring token '" + token + "'");
        precision = static_cast<int>(r.get_num().get_si());
        s = s.substr(0, at);
    }
    std::uint64_t param = 0;
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        Rational r = parse_rational(s.substr(colon + 1));
        if (r.get_den() != 1 || r <= 0)
            fail(ErrorCode::ParseError, "bad parameter in ring token '" + token + "'");
        param = r.get_num().get_ui();
        s = s.substr(0, colon);
    }
    RingDescriptor d;
    if (s == "real")
        d = real();
    else if (s == "complex")
        d = complex();
    else if (s == "quaternion")
        d = quaternion();
    else if (s == "padic")
        d = padic(param);
    else if (s == "laurent")
        d = laurent(param);
    else
        fail(ErrorCode::ParseError, "unknown ring '" + s + "'");
    if ((d.kind == RingKind::Padic || d.kind == RingKind::Laurent) && param == 0)
        fail(ErrorCode::ParseError, "ring '" + s + "' needs a parameter, e.g. padic:5");
    if (precision > 0)
        d.precision = precision;
    d.validate();
    return d;
}

// ---------------------------------------------------------------- points

IntegerPoint IntegerPoint::integer(std::int64_t v, RingKind kind)
{
    IntegerPoint z;
    z.kind = kind;
    z.c[0] = v;
    return z;
}

IntegerPoint IntegerPoint::gaussian(std::int64_t re, std::int64_t im)
{
    IntegerPoint z;
    z.kind = RingKind::Complex;
    z.c = {re, im, 0, 0};
    return z;
}

IntegerPoint IntegerPoint::hurwitz_doubled(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d)
{
    IntegerPoint z;
    z.kind = RingKind::Quaternion;
    z.c = {a, b, c, d};
    require(z.valid(), "Hurwitz doubled coordinates must share parity");
    return z;
}

IntegerPoint IntegerPoint::polynomial(std::vector<std::uint32_t> coeffs)
{
    IntegerPoint z;
    z.kind = RingKind::Laurent;
    trim_poly(coeffs);
    z.poly = std::move(coeffs);
    return z;
}

bool IntegerPoint::is_zero() const
{
    if (kind == RingKind::Laurent)
        return poly.empty();
    return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0;
}

bool IntegerPoint::valid() const
{
    switch (kind) {
    case RingKind::Quaternion: {
        auto par = [](std::int64_t v) { return v & 1; };
        return par(c[0]) == par(c[1]) && par(c[1]) == par(c[2]) && par(c[2]) == par(c[3]);
    }
    case RingKind::Laurent: return poly.empty() || poly.back() != 0;
    default: return true;
    }
}

AmbientPoint AmbientPoint::from_rationals(const RingDescriptor& ring, const std::vector<Rational>& coords)
{
    require(ring.archimedean(), "from_rationals needs an archimedean ring");
    require(static_cast<int>(coords.size()) == ring.components(), "wrong number of coordinates");
    AmbientPoint x;
    x.kind = ring.kind;
    x.bits = ring.precision;
    Rational scale(integer_pow(2, static_cast<unsigned long>(ring.precision)));
    for (std::size_t i = 0; i < coords.size(); ++i) {
        Rational y = coords[i] * scale + Rational(1, 2);
        Integer f;
        mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
        x.c[i] = to_int64(f);
    }
    return x;
}

AmbientPoint AmbientPoint::padic_digits(std::vector<std::uint32_t> digits)
{
    AmbientPoint x;
    x.kind = RingKind::Padic;
    x.digits = std::move(digits);
    return x;
}

AmbientPoint AmbientPoint::laurent(std::vector<std::uint32_t> poly, std::vector<std::uint32_t> frac)
{
    AmbientPoint x;
    x.kind = RingKind::Laurent;
    trim_poly(poly);
    x.poly = std::move(poly);
    x.digits = std::move(frac);
    return x;
}

Rational AmbientPoint::coordinate(int i) const { return dyadic(c[i], bits); }

// ---------------------------------------------------------------- norms

namespace {

std::int64_t component_distance(std::int64_t v, int bits)
{
    std::int64_t S = std::int64_t(1) << bits;
    std::int64_t k = nearest_multiple(v, S);
    return iabs(v - k * S);
}

NormValue laurent_frac_norm(const std::vector<std::uint32_t>& digits, std::uint64_t t, int precision)
{
    for (std::size_t k = 0; k < digits.size(); ++k)
        if (digits[k] != 0)
            return {rational_pow(Rational(static_cast<unsigned long>(t)), -static_cast<long>(k + 1)), false};
    long floor_exp = static_cast<long>(std::max<std::size_t>(digits.size(), static_cast<std::size_t>(precision)));
    return {rational_pow(Rational(static_cast<unsigned long>(t)), -floor_exp), true};
}

struct HurwitzChoice {
    std::array<std::int64_t, 4> z;  // doubled lattice coordinates
    std::array<std::int64_t, 4> d;  // |y_i - z_i S| at scale 2S
};

// y_i = 2 c_i at scale 2S, S = 2^bits.
std::pair<HurwitzChoice, HurwitzChoice> hurwitz_candidates(const AmbientPoint& x)
{
    std::int64_t S = std::int64_t(1) << x.bits;
    HurwitzChoice lip{}, half{};
    for (int i = 0; i < 4; ++i) {
        std::int64_t y = 2 * x.c[i];
        std::int64_t k = nearest_multiple(y, 2 * S);
        lip.z[i] = 2 * k;
        lip.d[i] = iabs(y - k * 2 * S);
        std::int64_t k2 = nearest_multiple(y - S, 2 * S);
        half.z[i] = 2 * k2 + 1;
        half.d[i] = iabs(y - (2 * k2 + 1) * S);
    }
    return {lip, half};
}

__int128 sum_sq(const std::array<std::int64_t, 4>& d)
{
    __int128 s = 0;
    for (auto v : d)
        s += static_cast<__int128>(v) * v;
    return s;
}

std::int64_t max_abs(const std::array<std::int64_t, 4>& d)
{
    std::int64_t m = 0;
    for (auto v : d)
        m = std::max(m, iabs(v));
    return m;
}

const HurwitzChoice& pick(const HurwitzChoice& a, const HurwitzChoice& b, Metric metric)
{
    if (metric == Metric::Euclidean) {
        __int128 da = sum_sq(a.d), db = sum_sq(b.d);
        if (da != db)
            return da < db ? a : b;
    } else {
        std::int64_t da = max_abs(a.d), db = max_abs(b.d);
        if (da != db)
            return da < db ? a : b;
    }
    return a.z < b.z ? a : b;
}

Rational int128_rational(__int128 v)
{
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    Integer hi, lo;
    mpz_set_ui(hi.get_mpz_t(), static_cast<unsigned long>(u >> 64));
    mpz_set_ui(lo.get_mpz_t(), static_cast<unsigned long>(u & ~std::uint64_t(0)));
    Integer z = (hi << 64) + lo;
    return Rational(neg ? Integer(-z) : z);
}

} // namespace

NormValue abs_value(const AmbientPoint& x, const RingDescriptor& ring)
{
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Complex:
    case RingKind::Quaternion: {
        std::int64_t m = 0;
        for (int i = 0; i < ring.components(); ++i)
            m = std::max(m, iabs(x.c[i]));
        return {dyadic(m, x.bits), false};
    }
    case RingKind::Padic: return padic_abs(x.digits, ring.p);
    case RingKind::Laurent:
        if (!x.poly.empty())
            return {rational_pow(Rational(static_cast<unsigned long>(ring.t)), static_cast<long>(x.poly.size() - 1)), false};
        return laurent_frac_norm(x.digits, ring.t, ring.precision);
    }
    return {};
}

NormValue dist_to_integers(const AmbientPoint& x, const RingDescriptor& ring)
{
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Complex: {
        std::int64_t m = 0;
        for (int i = 0; i < ring.components(); ++i)
            m = std::max(m, component_distance(x.c[i], x.bits));
        return {dyadic(m, x.bits), false};
    }
    case RingKind::Quaternion: {
        auto [lip, half] = hurwitz_candidates(x);
        const auto& best = pick(lip, half, Metric::Sup);
        return {dyadic(max_abs(best.d), x.bits + 1), false};
    }
    case RingKind::Padic:
        // Z is dense in Z_p: the distance is below every retained digit.
        return {rational_pow(Rational(static_cast<unsigned long>(ring.p)), -ring.precision), true};
    case RingKind::Laurent: return laurent_frac_norm(x.digits, ring.t, ring.precision);
    }
    return {};
}

Rational hurwitz_dist2(const AmbientPoint& x)
{
    require(x.kind == RingKind::Quaternion, "hurwitz_dist2 needs a quaternion");
    auto [lip, half] = hurwitz_candidates(x);
    const auto& best = pick(lip, half, Metric::Euclidean);
    Rational s = int128_rational(sum_sq(best.d));
    return s / Rational(integer_pow(2, 2UL * static_cast<unsigned long>(x.bits + 1)));
}

Rational norm2(const AmbientPoint& x)
{
    __int128 s = 0;
    for (auto v : x.c)
        s += static_cast<__int128>(v) * v;
    return int128_rational(s) / Rational(integer_pow(2, 2UL * static_cast<unsigned long>(x.bits)));
}

IntegerPoint nearest_hurwitz(const AmbientPoint& x, Metric metric)
{
    require(x.kind == RingKind::Quaternion, "nearest_hurwitz needs a quaternion");
    auto [lip, half] = hurwitz_candidates(x);
    const auto& best = pick(lip, half, metric);
    return IntegerPoint::hurwitz_doubled(best.z[0], best.z[1], best.z[2], best.z[3]);
}

HurwitzRounding round_hurwitz(const std::array<std::int64_t, 4>& c, int bits, Metric metric)
{
    AmbientPoint x;
    x.kind = RingKind::Quaternion;
    x.bits = bits;
    x.c = c;
    auto [lip, half] = hurwitz_candidates(x);
    const auto& best = pick(lip, half, metric);
    return {best.z, max_abs(best.d)};
}

std::vector<IntegerPoint> hurwitz_units()
{
    std::vector<IntegerPoint> out;
    for (int i = 0; i < 4; ++i)
        for (int s : {-2, 2}) {
            std::array<std::int64_t, 4> c{};
            c[i] = s;
            out.push_back(IntegerPoint::hurwitz_doubled(c[0], c[1], c[2], c[3]));
        }
    for (int mask = 0; mask < 16; ++mask) {
        std::array<std::int64_t, 4> c{};
        for (int i = 0; i < 4; ++i)
            c[i] = (mask >> i) & 1 ? -1 : 1;
        out.push_back(IntegerPoint::hurwitz_doubled(c[0], c[1], c[2], c[3]));
    }
    std::sort(out.begin(), out.end(), [](const IntegerPoint& a, const IntegerPoint& b) { return a.c < b.c; });
    return out;
}

namespace {

template <class T>
std::array<T, 4> qmul(const std::array<T, 4>& a, const std::array<T, 4>& b)
{
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

} // namespace

IntegerPoint hurwitz_mul(const IntegerPoint& a, const IntegerPoint& b)
{
    auto p = qmul(a.c, b.c);
    for (auto& v : p) {
        require(v % 2 == 0, "product left the Hurwitz order");
        v /= 2;
    }
    return IntegerPoint::hurwitz_doubled(p[0], p[1], p[2], p[3]);
}

IntegerPoint hurwitz_conj(const IntegerPoint& a)
{
    return IntegerPoint::hurwitz_doubled(a.c[0], -a.c[1], -a.c[2], -a.c[3]);
}

std::array<Rational, 4> quaternion_mul(const std::array<Rational, 4>& a, const std::array<Rational, 4>& b)
{
    return qmul(a, b);
}

// ---------------------------------------------------------------- p-adic

NormValue padic_abs(const std::vector<std::uint32_t>& digits, std::uint64_t p, bool demand_exact)
{
    Rational P(static_cast<unsigned long>(p));
    for (std::size_t v = 0; v < digits.size(); ++v)
        if (digits[v] != 0)
            return {rational_pow(P, -static_cast<long>(v)), false};
    if (demand_exact)
        fail(ErrorCode::PrecisionExhausted, "value is zero to all " + std::to_string(digits.size()) + " retained digits");
    return {rational_pow(P, -static_cast<long>(digits.size())), true};
}

NormValue padic_abs(std::int64_t value, std::uint64_t p, int precision, bool demand_exact)
{
    return padic_abs(padic_digits_of(value, p, precision), p, demand_exact);
}

std::vector<std::uint32_t> padic_digits_of(std::int64_t value, std::uint64_t p, int precision)
{
    std::uint64_t mod = 1;
    for (int i = 0; i < precision; ++i)
        mod *= p;
    __int128 r = static_cast<__int128>(value) % static_cast<__int128>(mod);
    if (r < 0)
        r += mod;
    std::uint64_t u = static_cast<std::uint64_t>(r);
    std::vector<std::uint32_t> d(static_cast<std::size_t>(precision));
    for (int i = 0; i < precision; ++i) {
        d[i] = static_cast<std::uint32_t>(u % p);
        u /= p;
    }
    return d;
}

// ---------------------------------------------------------------- reduce

std::pair<AmbientPoint, IntegerPoint> reduce(const AmbientPoint& x, const RingDescriptor& ring)
{
    AmbientPoint frac = x;
    IntegerPoint z;
    z.kind = ring.kind;
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Complex: {
        std::int64_t S = std::int64_t(1) << x.bits;
        for (int i = 0; i < ring.components(); ++i) {
            std::int64_t k = nearest_multiple(x.c[i], S);
            z.c[i] = k;
            frac.c[i] = x.c[i] - k * S;
        }
        break;
    }
    case RingKind::Quaternion: {
        z = nearest_hurwitz(x, Metric::Euclidean);
        for (int i = 0; i < 4; ++i) {
            // z_i / 2 at scale 2^bits
            __int128 scaled = static_cast<__int128>(z.c[i]) << x.bits;
            frac.c[i] = static_cast<std::int64_t>((static_cast<__int128>(x.c[i]) * 2 - scaled) / 2);
        }
        break;
    }
    case RingKind::Padic: {
        std::uint64_t mod = 1, value = 0;
        for (std::size_t i = 0; i < x.digits.size(); ++i) {
            value += x.digits[i] * mod;
            mod *= ring.p;
        }
        z.c[0] = static_cast<std::int64_t>(value);
        std::fill(frac.digits.begin(), frac.digits.end(), 0u);
        break;
    }
    case RingKind::Laurent:
        z.poly = x.poly;
        frac.poly.clear();
        break;
    }
    return {frac, z};
}

// ---------------------------------------------------------------- sampling

bool in_hurwitz_cell(const AmbientPoint& x)
{
    std::int64_t S = std::int64_t(1) << x.bits;
    std::int64_t sum = 0;
    for (auto v : x.c) {
        if (2 * iabs(v) > S)
            return false;
        sum += iabs(v);
    }
    return sum <= S;
}

Matrix sample_uniform(const RingDescriptor& ring, int m, int n, std::uint64_t seed)
{
    ring.validate();
    require(m >= 1 && n >= 1, "matrix shape must be positive");
    Rng rng(derive_seed(seed, 0x5a4d));
    Matrix a;
    a.rows = m;
    a.cols = n;
    a.entries.reserve(std::size_t(m) * n);
    for (int e = 0; e < m * n; ++e) {
        AmbientPoint x;
        x.kind = ring.kind;
        switch (ring.kind) {
        case RingKind::Real:
        case RingKind::Complex:
            x.bits = ring.precision;
            for (int i = 0; i < ring.components(); ++i)
                x.c[i] = static_cast<std::int64_t>(rng.below(std::uint64_t(1) << ring.precision));
            break;
        case RingKind::Quaternion: {
            x.bits = ring.precision;
            std::int64_t S = std::int64_t(1) << ring.precision;
            do {
                for (int i = 0; i < 4; ++i)
                    x.c[i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(S))) - S / 2;
            } while (!in_hurwitz_cell(x));
            break;
        }
        case RingKind::Padic:
            x.digits.resize(static_cast<std::size_t>(ring.precision));
            for (auto& d : x.digits)
                d = static_cast<std::uint32_t>(rng.below(ring.p));
            break;
        case RingKind::Laurent:
            x.digits.resize(static_cast<std::size_t>(ring.precision));
            for (auto& d : x.digits)
                d = static_cast<std::uint32_t>(rng.below(ring.t));
            break;
        }
        a.entries.push_back(std::move(x));
    }
    return a;
}

// ---------------------------------------------------------------- counting

Integer count_shell(const RingDescriptor& ring, int m, const Rational& height, CountMode mode)
{
    require(m >= 1, "count_shell needs m >= 1");
    auto unattainable = [&]() -> Integer {
        fail(ErrorCode::UnattainableHeight,
             "height " + format_rational(height) + " is not a value of the " + ring_kind_name(ring.kind) + " norm");
    };
    if (height < 0)
        unattainable();
    auto um = static_cast<unsigned long>(m);
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Padic:
    case RingKind::Complex: {
        if (height.get_den() != 1)
            unattainable();
        Integer Q = height.get_num();
        unsigned long dim = um * static_cast<unsigned long>(ring.kind == RingKind::Complex ? 2 : 1);
        auto box = [&](const Integer& side) {
            Integer z;
            mpz_pow_ui(z.get_mpz_t(), side.get_mpz_t(), dim);
            return z;
        };
        Integer at_most = box(2 * Q + 1);
        if (mode == CountMode::AtMost)
            return at_most;
        if (Q == 0)
            return Integer(1);
        return at_most - box(2 * Q - 1);
    }
    case RingKind::Quaternion: {
        Rational doubled = height * 2;
        if (doubled.get_den() != 1)
            unattainable();
        Integer D = doubled.get_num();
        auto at_most = [&](const Integer& d) {
            if (d < 0)
                return Integer(0);
            Integer evens = 2 * (d / 2) + 1;
            Integer odds = 2 * ((d + 1) / 2);
            Integer e4, o4, per, out;
            mpz_pow_ui(e4.get_mpz_t(), evens.get_mpz_t(), 4);
            mpz_pow_ui(o4.get_mpz_t(), odds.get_mpz_t(), 4);
            per = e4 + o4;
            mpz_pow_ui(out.get_mpz_t(), per.get_mpz_t(), um);
            return out;
        };
        if (mode == CountMode::AtMost)
            return at_most(D);
        return at_most(D) - at_most(D - 1);
    }
    case RingKind::Laurent: {
        Integer t(static_cast<unsigned long>(ring.t));
        if (height == 0)
            return Integer(1);
        if (height.get_den() != 1)
            unattainable();
        long r = floor_log(height, ring.t);
        if (Rational(integer_pow(ring.t, static_cast<unsigned long>(r))) != height)
            unattainable();
        auto pow_t = [&](unsigned long e) { return integer_pow(ring.t, e); };
        Integer at_most = pow_t(um * static_cast<unsigned long>(r + 1));
        if (mode == CountMode::AtMost)
            return at_most;
        return at_most - pow_t(um * static_cast<unsigned long>(r));
    }
    }
    return Integer(0);
}

// ---------------------------------------------------------------- text forms

std::string format_point(const AmbientPoint& x, const RingDescriptor& ring)
{
    switch (ring.kind) {
    case RingKind::Real: return format_rational(x.coordinate(0));
    case RingKind::Complex: {
        Rational im = x.coordinate(1);
        std::string out = format_rational(x.coordinate(0));
        out += im < 0 ? "-" : "+";
        out += format_rational(im < 0 ? Rational(-im) : im) + "i";
        return out;
    }
    case RingKind::Quaternion: {
        std::string out;
        for (int i = 0; i < 4; ++i) {
            if (i)
                out += ',';
            out += format_rational(x.coordinate(i));
        }
        return out;
    }
    case RingKind::Padic: return "p" + std::to_string(ring.p) + ":" + join_digits(x.digits);
    case RingKind::Laurent: {
        std::string out = "t" + std::to_string(ring.t) + ":";
        if (!x.poly.empty())
            out += "{" + join_digits(x.poly) + "}";
        return out + "[" + join_digits(x.digits) + "]";
    }
    }
    return "";
}

namespace {

std::pair<Rational, Rational> parse_complex_parts(const std::string& s)
{
    std::string body = trim_copy(s);
    if (body.empty())
        fail(ErrorCode::ParseError, "empty complex literal");
    if (body.back() != 'i')
        return {parse_rational(body), Rational(0)};
    body.pop_back();
    std::size_t split_at = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i)
        if (body[i] == '+' || body[i] == '-')
            split_at = i;
    if (split_at == std::string::npos)
        return {Rational(0), body.empty() ? Rational(1) : parse_rational(body)};
    std::string re = body.substr(0, split_at);
    std::string im = body.substr(split_at);
    if (im == "+" || im == "-")
        im += "1";
    return {parse_rational(re), parse_rational(im)};
}

std::string expect_prefix(const std::string& s, char tag, std::uint64_t value)
{
    std::string body = trim_copy(s);
    std::string prefix = std::string(1, tag) + std::to_string(value) + ":";
    if (body.rfind(prefix, 0) != 0)
        fail(ErrorCode::ParseError, "expected prefix '" + prefix + "' in '" + s + "'");
    return body.substr(prefix.size());
}

} // namespace

AmbientPoint parse_point(const std::string& text, const RingDescriptor& ring)
{
    switch (ring.kind) {
    case RingKind::Real: return AmbientPoint::from_rationals(ring, {parse_rational(text)});
    case RingKind::Complex: {
        auto [re, im] = parse_complex_parts(text);
        return AmbientPoint::from_rationals(ring, {re, im});
    }
    case RingKind::Quaternion: {
        auto parts = parse_rational_list(text);
        if (parts.size() != 4)
            fail(ErrorCode::ParseError, "quaternion needs 4 coordinates: '" + text + "'");
        return AmbientPoint::from_rationals(ring, parts);
    }
    case RingKind::Padic: {
        auto digits = parse_digit_list(expect_prefix(text, 'p', ring.p), ring.p);
        if (static_cast<int>(digits.size()) > ring.precision)
            fail(ErrorCode::ParseError, "more digits than the ring precision");
        digits.resize(static_cast<std::size_t>(ring.precision), 0);
        return AmbientPoint::padic_digits(std::move(digits));
    }
    case RingKind::Laurent: {
        std::string body = expect_prefix(text, 't', ring.t);
        std::vector<std::uint32_t> poly;
        if (!body.empty() && body.front() == '{') {
            auto close = body.find('}');
            if (close == std::string::npos)
                fail(ErrorCode::ParseError, "unterminated polynomial part in '" + text + "'");
            poly = parse_digit_list(body.substr(1, close - 1), ring.t);
            body = body.substr(close + 1);
        }
        if (body.size() < 2 || body.front() != '[' || body.back() != ']')
            fail(ErrorCode::ParseError, "Laurent fractional part must be [a1,...]: '" + text + "'");
        auto frac = parse_digit_list(body.substr(1, body.size() - 2), ring.t);
        if (static_cast<int>(frac.size()) > ring.precision)
            fail(ErrorCode::ParseError, "more coefficients than the ring precision");
        frac.resize(static_cast<std::size_t>(ring.precision), 0);
        return AmbientPoint::laurent(std::move(poly), std::move(frac));
    }
    }
    return {};
}

std::string format_integer(const IntegerPoint& z, const RingDescriptor& ring)
{
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Padic: return std::to_string(z.c[0]);
    case RingKind::Complex:
        return std::to_string(z.c[0]) + (z.c[1] < 0 ? "-" : "+") + std::to_string(iabs(z.c[1])) + "i";
    case RingKind::Quaternion: {
        std::string out;
        for (int i = 0; i < 4; ++i) {
            if (i)
                out += ',';
            Rational r(static_cast<long>(z.c[i]), 2);
            r.canonicalize();
            out += format_rational(r);
        }
        return out;
    }
    case RingKind::Laurent: return "t" + std::to_string(ring.t) + ":{" + join_digits(z.poly) + "}";
    }
    return "";
}

IntegerPoint parse_integer_point(const std::string& text, const RingDescriptor& ring)
{
    auto as_int = [&](const Rational& r) {
        if (r.get_den() != 1)
            fail(ErrorCode::ParseError, "not an integer: '" + text + "'");
        return to_int64(r.get_num());
    };
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Padic: return IntegerPoint::integer(as_int(parse_rational(text)), ring.kind);
    case RingKind::Complex: {
        auto [re, im] = parse_complex_parts(text);
        return IntegerPoint::gaussian(as_int(re), as_int(im));
    }
    case RingKind::Quaternion: {
        auto parts = parse_rational_list(text);
        if (parts.size() != 4)
            fail(ErrorCode::ParseError, "quaternion needs 4 coordinates: '" + text + "'");
        std::array<std::int64_t, 4> d{};
        for (int i = 0; i < 4; ++i)
            d[i] = as_int(parts[i] * 2);
        IntegerPoint z;
        z.kind = RingKind::Quaternion;
        z.c = d;
        if (!z.valid())
            fail(ErrorCode::ParseError, "not a Hurwitz integer: '" + text + "'");
        return z;
    }
    case RingKind::Laurent: {
        std::string body = expect_prefix(text, 't', ring.t);
        if (body.size() < 2 || body.front() != '{' || body.back() != '}')
            fail(ErrorCode::ParseError, "polynomial must be {c0,c1,...}: '" + text + "'");
        return IntegerPoint::polynomial(parse_digit_list(body.substr(1, body.size() - 2), ring.t));
    }
    }
    return {};
}

std::string format_matrix(const Matrix& a, const RingDescriptor& ring)
{
    std::ostringstream os;
    os << ring.token() << ' ' << a.rows << ' ' << a.cols << '\n';
    for (const auto& e : a.entries)
        os << format_point(e, ring) << '\n';
    return os.str();
}

std::pair<RingDescriptor, Matrix> parse_matrix(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        std::string s = trim_copy(line);
        if (s.empty() || s[0] == '#')
            continue;
        lines.push_back(s);
    }
    if (lines.empty())
        fail(ErrorCode::ParseError, "matrix file is empty");
    std::istringstream header(lines[0]);
    std::string token;
    int m = 0, n = 0;
    if (!(header >> token >> m >> n) || m < 1 || n < 1)
        fail(ErrorCode::ParseError, "matrix header must be 'ring m n'");
    RingDescriptor ring = RingDescriptor::parse_token(token);
    if (lines.size() != static_cast<std::size_t>(m * n + 1))
        fail(ErrorCode::ParseError, "matrix file has " + std::to_string(lines.size() - 1) + " entries, expected " +
                                        std::to_string(m * n));
    Matrix a;
    a.rows = m;
    a.cols = n;
    for (std::size_t i = 1; i < lines.size(); ++i)
        a.entries.push_back(parse_point(lines[i], ring));
    return {ring, a};
}

} // namespace limsup
