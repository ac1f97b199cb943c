#include "limsup/solver.hpp"
#include "limsup/error.hpp"
#include "limsup/finite_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace limsup {

const char* strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::FirstFound: return "first_found";
    case Strategy::MinError: return "min_error";
    case Strategy::MinHeight: return "min_height";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name)
{
    for (Strategy s : {Strategy::FirstFound, Strategy::MinError, Strategy::MinHeight})
        if (name == strategy_name(s))
            return s;
    fail(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
}

const char* status_name(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Found: return "found";
    case SolveStatus::CertifiedNone: return "certified_none";
    case SolveStatus::SearchExhausted: return "search_exhausted";
    }
    return "?";
}

namespace {

constexpr std::int64_t kThresholdClamp = std::int64_t(1) << 62;

std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

__int128 floor_div128(__int128 a, __int128 b)
{
    __int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

std::int64_t clamp_integer(const Integer& z)
{
    if (z > Integer(static_cast<long>(kThresholdClamp)))
        return kThresholdClamp;
    if (z < Integer(static_cast<long>(-kThresholdClamp)))
        return -kThresholdClamp;
    return to_int64(z);
}

std::vector<PowerProduct> broadcast(const std::vector<PowerProduct>& v, int length, const char* what)
{
    if (v.size() == 1 && length != 1)
        return std::vector<PowerProduct>(static_cast<std::size_t>(length), v[0]);
    require(static_cast<int>(v.size()) == length,
            std::string(what) + " needs " + std::to_string(length) + " entries, got " + std::to_string(v.size()));
    return v;
}

PowerProduct pp_pow(std::uint64_t base, long e) { return PowerProduct::of(base).pow(Rational(e)); }

Rational dyadic(std::int64_t num, int bits)
{
    Rational r(Integer(static_cast<long>(num)), integer_pow(2, static_cast<unsigned long>(bits)));
    r.canonicalize();
    return r;
}

Rational int_pow_rational(std::uint64_t base, long e) { return rational_pow(Rational(static_cast<unsigned long>(base)), e); }

// Largest d >= -1 with base^d <= bound (d = -1 when bound < 1).
long log_floor(const PowerProduct& bound, std::uint64_t base)
{
    long d = static_cast<long>(std::floor(bound.log2() / std::log2(static_cast<long double>(base))));
    d = std::max(d, -2L);
    while (d >= 0 && pp_pow(base, d) > bound)
        --d;
    while (pp_pow(base, d + 1) <= bound)
        ++d;
    return std::max(d, -1L);
}

// Smallest k >= 0 with base^-k < bound.
long strict_exponent(const PowerProduct& bound, std::uint64_t base)
{
    long k = std::max(0L, static_cast<long>(std::floor(-bound.log2() / std::log2(static_cast<long double>(base)))) - 1);
    while (k > 0 && pp_pow(base, -(k - 1)) < bound)
        --k;
    while (!(pp_pow(base, -k) < bound))
        ++k;
    return k;
}

std::int64_t cap_of(const PowerProduct& bound, int doubled)
{
    PowerProduct b = doubled ? bound * PowerProduct::of(2) : bound;
    return clamp_integer(b.floor());
}

int slot_width(RingKind kind)
{
    switch (kind) {
    case RingKind::Complex: return 2;
    case RingKind::Quaternion: return 4;
    default: return 1;
    }
}

template <class T>
std::array<T, 4> qmul(const std::array<T, 4>& a, const std::array<T, 4>& b)
{
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

std::int64_t narrow(__int128 v)
{
    if (v > std::numeric_limits<std::int64_t>::max() / 4 || v < std::numeric_limits<std::int64_t>::min() / 4)
        fail(ErrorCode::PrecisionExhausted, "fixed-point product overflows 64 bits; lower the precision");
    return static_cast<std::int64_t>(v);
}

} // namespace

struct Shell {
    Rational height;
    std::int64_t level = 0;
    std::vector<std::int64_t> caps;      // per q_k, in level units
    std::vector<std::int64_t> thr;       // per form: numerator threshold, p-adic k, or Laurent c
    std::vector<std::int64_t> companion; // p-adic companion caps
};

struct Detail {
    std::vector<IntegerPoint> p;
    std::vector<NormValue> errors;
    Rational height;
};

struct PreparedSearch::Impl {
    RingDescriptor ring;
    int m = 0, n = 0;
    int width = 1;
    bool right = false;
    bool cumulative = false; // p-adic shell mode: a_0 ranges over the whole ball
    std::uint64_t budget = 0;
    std::optional<WeightVector> weight;
    int scale_bits = 0;
    std::vector<std::uint64_t> pk; // p^0..p^L
    std::vector<Shell> shells;

    struct Loaded {
        std::vector<std::int64_t> num;  // archimedean numerators, [(k*n + j)*4 + c]
        std::vector<std::uint64_t> xp;  // p-adic residues mod p^L, [k*n + j]
        const Matrix* A = nullptr;
    };

    Loaded load(const Matrix& A) const;
    bool evaluate(const Loaded& L, const Shell& sh, const std::vector<std::int64_t>& v, std::int64_t& key,
                  Detail* detail) const;
    std::vector<IntegerPoint> q_points(const std::vector<std::int64_t>& v) const;
    Rational height_of(const std::vector<std::int64_t>& v) const;

    template <class Visit>
    bool walk(const Shell& sh, Visit&& visit) const;
};

PreparedSearch::Impl::Loaded PreparedSearch::Impl::load(const Matrix& A) const
{
    require(A.rows == m && A.cols == n, "matrix shape does not match the prepared search");
    Loaded L;
    L.A = &A;
    for (const auto& x : A.entries)
        require(x.kind == ring.kind, "matrix entry of the wrong ring");
    if (ring.archimedean()) {
        L.num.assign(std::size_t(m) * n * 4, 0);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < n; ++j) {
                const auto& x = A.at(k, j);
                require(x.bits == ring.precision, "matrix entry precision does not match the ring");
                for (int c = 0; c < width; ++c)
                    L.num[(std::size_t(k) * n + j) * 4 + c] = x.c[c];
            }
    } else if (ring.kind == RingKind::Padic) {
        L.xp.assign(std::size_t(m) * n, 0);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < n; ++j) {
                const auto& x = A.at(k, j);
                require(static_cast<int>(x.digits.size()) >= ring.precision, "p-adic entry shorter than the precision");
                std::uint64_t value = 0;
                for (int i = ring.precision - 1; i >= 0; --i)
                    value = value * ring.p + x.digits[static_cast<std::size_t>(i)];
                L.xp[std::size_t(k) * n + j] = value;
            }
    } else {
        for (const auto& x : A.entries)
            require(static_cast<int>(x.digits.size()) >= ring.precision, "Laurent entry shorter than the precision");
    }
    return L;
}

std::vector<IntegerPoint> PreparedSearch::Impl::q_points(const std::vector<std::int64_t>& v) const
{
    std::vector<IntegerPoint> out;
    for (int k = 0; k < m; ++k) {
        const std::int64_t* s = &v[std::size_t(k) * width];
        switch (ring.kind) {
        case RingKind::Real: out.push_back(IntegerPoint::integer(s[0])); break;
        case RingKind::Padic: out.push_back(IntegerPoint::integer(s[0], RingKind::Padic)); break;
        case RingKind::Complex: out.push_back(IntegerPoint::gaussian(s[0], s[1])); break;
        case RingKind::Quaternion: out.push_back(IntegerPoint::hurwitz_doubled(s[0], s[1], s[2], s[3])); break;
        case RingKind::Laurent: break;
        }
    }
    return out;
}

Rational PreparedSearch::Impl::height_of(const std::vector<std::int64_t>& v) const
{
    std::int64_t h = 0;
    for (auto x : v)
        h = std::max(h, iabs(x));
    return ring.kind == RingKind::Quaternion ? Rational(h, 2) : Rational(h);
}

// Walk over the slot vectors of one shell. Slots are fixed from the last one
// down to the first, each running through 0, 1, -1, 2, -2, ...; the last
// nonzero slot is positive (q and -q give the same errors).
template <class Visit>
bool PreparedSearch::Impl::walk(const Shell& sh, Visit&& visit) const
{
    const int slots = m * width;
    const bool exact = !cumulative;
    std::vector<std::int64_t> v(static_cast<std::size_t>(slots), 0);
    // earlier[i]: some slot below i may still reach the shell level
    std::vector<char> earlier(static_cast<std::size_t>(slots), 0);
    for (int i = 1; i < slots; ++i)
        earlier[std::size_t(i)] = earlier[std::size_t(i - 1)] || sh.caps[std::size_t((i - 1) / width)] >= sh.level;
    bool stop = false;
    auto rec = [&](auto&& self, int i, bool hit, bool nonzero) -> void {
        if (stop)
            return;
        if (i < 0) {
            if (nonzero && (hit || !exact) && !visit(v))
                stop = true;
            return;
        }
        std::int64_t cap = sh.caps[std::size_t(i / width)];
        bool forced = exact && !hit && !earlier[std::size_t(i)];
        int parity = -1;
        if (width == 4 && i % 4 != 3)
            parity = static_cast<int>(iabs(v[std::size_t(i - i % 4 + 3)]) & 1);
        auto try_value = [&](std::int64_t val) {
            if (stop || (!nonzero && val < 0))
                return;
            if (parity >= 0 && static_cast<int>(iabs(val) & 1) != parity)
                return;
            v[std::size_t(i)] = val;
            self(self, i - 1, hit || iabs(val) == sh.level, nonzero || val != 0);
            v[std::size_t(i)] = 0;
        };
        if (forced) {
            if (cap >= sh.level) {
                try_value(sh.level);
                try_value(-sh.level);
            }
            return;
        }
        try_value(0);
        for (std::int64_t mag = 1; mag <= cap && !stop; ++mag) {
            try_value(mag);
            try_value(-mag);
        }
    };
    rec(rec, slots - 1, false, false);
    return !stop;
}

bool PreparedSearch::Impl::evaluate(const Loaded& L, const Shell& sh, const std::vector<std::int64_t>& v,
                                    std::int64_t& key, Detail* detail) const
{
    key = std::numeric_limits<std::int64_t>::min();
    if (detail) {
        detail->p.clear();
        detail->errors.clear();
        detail->height = height_of(v);
    }
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Complex: {
        const int b = ring.precision;
        const __int128 S = __int128(1) << b;
        for (int j = 0; j < n; ++j) {
            __int128 acc[2] = {0, 0};
            for (int k = 0; k < m; ++k) {
                const std::int64_t* a = &L.num[(std::size_t(k) * n + j) * 4];
                if (width == 1) {
                    acc[0] += __int128(v[std::size_t(k)]) * a[0];
                } else {
                    std::int64_t qr = v[std::size_t(k) * 2], qi = v[std::size_t(k) * 2 + 1];
                    acc[0] += __int128(qr) * a[0] - __int128(qi) * a[1];
                    acc[1] += __int128(qr) * a[1] + __int128(qi) * a[0];
                }
            }
            std::int64_t err = 0;
            std::int64_t near[2] = {0, 0};
            for (int c = 0; c < width; ++c) {
                __int128 f = floor_div128(acc[c], S);
                __int128 r = acc[c] - f * S;
                if (2 * r > S) {
                    ++f;
                    r = S - r;
                }
                near[c] = narrow(f);
                err = std::max(err, static_cast<std::int64_t>(r));
            }
            if (err >= sh.thr[std::size_t(j)])
                return false;
            key = std::max(key, err);
            if (detail) {
                detail->p.push_back(width == 1 ? IntegerPoint::integer(near[0]) : IntegerPoint::gaussian(near[0], near[1]));
                detail->errors.push_back({dyadic(err, b), false});
            }
        }
        return true;
    }
    case RingKind::Quaternion: {
        const int b = ring.precision;
        for (int j = 0; j < n; ++j) {
            std::array<__int128, 4> acc{0, 0, 0, 0};
            for (int k = 0; k < m; ++k) {
                const std::int64_t* a = &L.num[(std::size_t(k) * n + j) * 4];
                std::array<__int128, 4> qa{v[std::size_t(k) * 4], v[std::size_t(k) * 4 + 1], v[std::size_t(k) * 4 + 2],
                                           v[std::size_t(k) * 4 + 3]};
                std::array<__int128, 4> xa{a[0], a[1], a[2], a[3]};
                auto prod = right ? qmul(xa, qa) : qmul(qa, xa);
                for (int c = 0; c < 4; ++c)
                    acc[c] += prod[c];
            }
            std::array<std::int64_t, 4> num{narrow(acc[0]), narrow(acc[1]), narrow(acc[2]), narrow(acc[3])};
            auto rounding = round_hurwitz(num, b + 1, Metric::Sup);
            if (rounding.sup_distance >= sh.thr[std::size_t(j)])
                return false;
            key = std::max(key, rounding.sup_distance);
            if (detail) {
                detail->p.push_back(IntegerPoint::hurwitz_doubled(rounding.z[0], rounding.z[1], rounding.z[2], rounding.z[3]));
                detail->errors.push_back({dyadic(rounding.sup_distance, b + 2), false});
            }
        }
        return true;
    }
    case RingKind::Padic: {
        const auto P = static_cast<__int128>(pk.back());
        const int Ldig = ring.precision;
        std::int64_t top = 0;
        for (int k = 0; k < m; ++k)
            top = std::max(top, iabs(v[std::size_t(k)]));
        for (int j = 0; j < n; ++j) {
            __int128 s = 0;
            for (int k = 0; k < m; ++k)
                s = (s + __int128(v[std::size_t(k)]) * __int128(L.xp[std::size_t(k) * n + j])) % P;
            if (s < 0)
                s += P;
            auto kj = static_cast<std::size_t>(sh.thr[std::size_t(j)]);
            const auto mod = static_cast<__int128>(pk[kj]);
            __int128 r = (mod - s % mod) % mod;
            if (2 * r > mod)
                r -= mod;
            auto companion = static_cast<std::int64_t>(r);
            if (iabs(companion) > sh.companion[std::size_t(j)])
                return false;
            __int128 total = ((s + r) % P + P) % P;
            int val = 0;
            if (total == 0) {
                val = Ldig;
            } else {
                while (total % static_cast<__int128>(ring.p) == 0) {
                    total /= static_cast<__int128>(ring.p);
                    ++val;
                }
            }
            top = std::max(top, iabs(companion));
            key = std::max<std::int64_t>(key, -val);
            if (detail) {
                detail->p.push_back(IntegerPoint::integer(companion, RingKind::Padic));
                detail->errors.push_back({int_pow_rational(ring.p, -val), val >= Ldig});
            }
        }
        if (detail)
            detail->height = Rational(top);
        return true;
    }
    case RingKind::Laurent: break;
    }
    return false;
}

namespace {

std::vector<std::uint32_t> laurent_poly(const std::vector<std::int64_t>& v, int k, int d)
{
    std::vector<std::uint32_t> f(v.begin() + std::ptrdiff_t(k) * (d + 1), v.begin() + std::ptrdiff_t(k + 1) * (d + 1));
    while (!f.empty() && f.back() == 0)
        f.pop_back();
    return f;
}

} // namespace

PreparedSearch::PreparedSearch(const LinearFormSystem& shape)
{
    auto impl = std::make_shared<Impl>();
    const auto& ring = shape.ring;
    ring.validate();
    const int m = shape.m(), n = shape.n();
    require(m >= 1 && n >= 1, "system shape must be positive");
    impl->ring = ring;
    impl->m = m;
    impl->n = n;
    impl->width = slot_width(ring.kind);
    impl->right = shape.right_multiply;
    impl->budget = shape.budget;
    impl->weight = shape.weight;
    require(!shape.right_multiply || ring.kind == RingKind::Quaternion, "right multiplication applies to quaternions only");
    if (shape.weight) {
        require(ring.kind == RingKind::Real, "quasi-norm ordering is available for the real ring only");
        require(!shape.shell_bounds, "quasi-norm ordering needs fixed error bounds");
        shape.weight->validate(m, n);
        require(static_cast<int>(shape.weight->v.size()) == m, "weight vector needs m entries");
    }
    const bool shell_mode = static_cast<bool>(shape.shell_bounds);
    const bool padic = ring.kind == RingKind::Padic;
    impl->cumulative = padic && shell_mode;

    std::vector<PowerProduct> fixed_errors;
    if (!shell_mode)
        fixed_errors = broadcast(shape.error_bounds, n, "error_bounds");

    // a_0 caps first; fixed p-adic systems also carry n companion caps
    std::vector<PowerProduct> heights;
    if (padic && !shell_mode)
        heights = broadcast(shape.height_bounds, m + n, "height_bounds");
    else if (padic && static_cast<int>(shape.height_bounds.size()) == m + n && n > 0 && shape.height_bounds.size() > 1)
        heights.assign(shape.height_bounds.begin(), shape.height_bounds.begin() + m);
    else
        heights = broadcast(shape.height_bounds, m, "height_bounds");

    if (ring.archimedean())
        impl->scale_bits = ring.precision + (ring.kind == RingKind::Quaternion ? 2 : 0);
    if (padic) {
        impl->pk.push_back(1);
        for (int i = 0; i < ring.precision; ++i) {
            require(impl->pk.back() < (std::uint64_t(1) << 62) / ring.p, "p^precision must stay below 2^62");
            impl->pk.push_back(impl->pk.back() * ring.p);
        }
    }

    std::vector<std::int64_t> qcaps;
    std::int64_t top = 0;
    for (int k = 0; k < m; ++k) {
        std::int64_t c = ring.kind == RingKind::Laurent ? log_floor(heights[std::size_t(k)], ring.t)
                                                        : cap_of(heights[std::size_t(k)], ring.kind == RingKind::Quaternion);
        qcaps.push_back(c);
        top = std::max(top, c);
    }
    std::vector<std::int64_t> companions;
    if (padic && !shell_mode)
        for (int j = 0; j < n; ++j)
            companions.push_back(cap_of(heights[std::size_t(m + j)], 0));

    auto thresholds = [&](const std::vector<PowerProduct>& bounds, std::int64_t level) {
        std::vector<std::int64_t> thr;
        for (const auto& g : bounds) {
            switch (ring.kind) {
            case RingKind::Real:
            case RingKind::Complex:
            case RingKind::Quaternion:
                thr.push_back(clamp_integer((g * pp_pow(2, impl->scale_bits)).ceil()));
                break;
            case RingKind::Padic: {
                long k = strict_exponent(g, ring.p);
                if (k > ring.precision)
                    fail(ErrorCode::PrecisionExhausted, "error bound " + g.to_string() + " needs " + std::to_string(k) +
                                                            " p-adic digits, precision is " + std::to_string(ring.precision));
                thr.push_back(k);
                break;
            }
            case RingKind::Laurent: {
                long c = strict_exponent(g, ring.t);
                c = std::max(0L, c - 1);
                if (c + level > ring.precision)
                    fail(ErrorCode::PrecisionExhausted, "error bound " + g.to_string() + " at degree " +
                                                            std::to_string(level) + " exceeds the Laurent precision");
                thr.push_back(c);
                break;
            }
            }
        }
        return thr;
    };

    const std::int64_t first = ring.kind == RingKind::Laurent ? 0 : 1;
    for (std::int64_t level = first; level <= top; ++level) {
        Shell sh;
        sh.level = level;
        switch (ring.kind) {
        case RingKind::Quaternion: sh.height = Rational(level, 2); break;
        case RingKind::Laurent: sh.height = Rational(integer_pow(ring.t, static_cast<unsigned long>(level))); break;
        default: sh.height = Rational(level); break;
        }
        for (auto c : qcaps)
            sh.caps.push_back(std::min(c, level));
        std::vector<PowerProduct> bounds = shell_mode ? broadcast(shape.shell_bounds(sh.height), n, "shell bounds") : fixed_errors;
        sh.thr = thresholds(bounds, level);
        if (padic)
            sh.companion = shell_mode ? std::vector<std::int64_t>(std::size_t(n), level) : companions;
        impl->shells.push_back(std::move(sh));
        if (shape.weight)
            break; // thresholds are shared, a single template shell suffices
    }
    if (shape.weight && !impl->shells.empty()) {
        impl->shells[0].caps = qcaps;
        impl->shells[0].level = top;
    }
    impl_ = std::move(impl);
}

namespace {

struct Best {
    bool have = false;
    std::int64_t key = 0;
    Rational height;
    std::vector<std::int64_t> v;
    const Shell* shell = nullptr;
};

// Laurent walk: every coefficient vector of degree exactly d, first nonzero slot 1.
template <class Visit>
bool laurent_walk(const FiniteField& F, int m, const Shell& sh, Visit&& visit)
{
    const int d = static_cast<int>(sh.level);
    const int per = d + 1;
    const int slots = m * per;
    std::vector<std::int64_t> v(static_cast<std::size_t>(slots), 0);
    bool stop = false;
    auto rec = [&](auto&& self, int i, bool nonzero) -> void {
        if (stop)
            return;
        if (i == slots) {
            if (!nonzero)
                return;
            bool hit = false;
            for (int k = 0; k < m; ++k)
                hit = hit || v[std::size_t(k) * per + d] != 0;
            if (hit && !visit(v))
                stop = true;
            return;
        }
        int k = i / per, idx = i % per;
        if (idx > sh.caps[std::size_t(k)]) {
            self(self, i + 1, nonzero);
            return;
        }
        if (!nonzero) {
            self(self, i + 1, false);
            if (stop)
                return;
            v[std::size_t(i)] = 1;
            self(self, i + 1, true);
            v[std::size_t(i)] = 0;
            return;
        }
        for (std::uint32_t val = 0; val < F.size() && !stop; ++val) {
            v[std::size_t(i)] = val;
            self(self, i + 1, true);
        }
        v[std::size_t(i)] = 0;
    };
    rec(rec, 0, false);
    return !stop;
}

// Coefficient of X^-i in sum_k q_k A_kj, for i >= 1 (requires i + deg <= L).
std::uint32_t laurent_frac_coeff(const FiniteField& F, const Matrix& A, const std::vector<std::int64_t>& v, int m, int d,
                                 int j, int i)
{
    std::uint32_t acc = 0;
    for (int k = 0; k < m; ++k) {
        const auto& a = A.at(k, j).digits;
        for (int l = 0; l <= d; ++l) {
            auto q = static_cast<std::uint32_t>(v[std::size_t(k) * (d + 1) + l]);
            if (q != 0)
                acc = F.add(acc, F.mul(q, a[std::size_t(i + l - 1)]));
        }
    }
    return acc;
}

bool laurent_evaluate(const RingDescriptor& ring, const Matrix& A, const Shell& sh, const std::vector<std::int64_t>& v,
                      int m, int n, std::int64_t& key, Detail* detail)
{
    const auto& F = ring.field();
    const int d = static_cast<int>(sh.level);
    const int limit = ring.precision - d;
    key = std::numeric_limits<std::int64_t>::min();
    if (detail) {
        detail->p.clear();
        detail->errors.clear();
        detail->height = sh.height;
    }
    for (int j = 0; j < n; ++j) {
        auto c = static_cast<int>(sh.thr[std::size_t(j)]);
        for (int i = 1; i <= c; ++i)
            if (laurent_frac_coeff(F, A, v, m, d, j, i) != 0)
                return false;
        int first = 0;
        for (int i = c + 1; i <= limit && first == 0; ++i)
            if (laurent_frac_coeff(F, A, v, m, d, j, i) != 0)
                first = i;
        key = std::max<std::int64_t>(key, first == 0 ? -(limit + 1) : -first);
        if (detail) {
            // Polynomial part: X^s coefficients from fractional digits and any polynomial part of A.
            std::vector<std::uint32_t> poly(static_cast<std::size_t>(d + 1), 0);
            for (int k = 0; k < m; ++k) {
                const auto& x = A.at(k, j);
                for (int l = 0; l <= d; ++l) {
                    auto q = static_cast<std::uint32_t>(v[std::size_t(k) * (d + 1) + l]);
                    if (q == 0)
                        continue;
                    for (int s = 0; s < l; ++s) {
                        int idx = l - s; // digit a_idx multiplies X^{l-idx}
                        if (idx <= static_cast<int>(x.digits.size()))
                            poly[std::size_t(s)] = F.add(poly[std::size_t(s)], F.mul(q, x.digits[std::size_t(idx - 1)]));
                    }
                    for (std::size_t e = 0; e < x.poly.size(); ++e) {
                        if (poly.size() < std::size_t(l) + e + 1)
                            poly.resize(std::size_t(l) + e + 1, 0);
                        poly[std::size_t(l) + e] = F.add(poly[std::size_t(l) + e], F.mul(q, x.poly[e]));
                    }
                }
            }
            detail->p.push_back(IntegerPoint::polynomial(poly));
            detail->errors.push_back(first == 0 ? NormValue{int_pow_rational(ring.t, -limit), true}
                                                : NormValue{int_pow_rational(ring.t, -first), false});
        }
    }
    return true;
}

} // namespace

SolutionRecord PreparedSearch::solve(const Matrix& A, Strategy strategy) const
{
    const Impl& I = *impl_;
    auto loaded = I.load(A);
    SolutionRecord rec;
    Best best;
    bool exhausted = false;
    const bool full = strategy == Strategy::MinError || (strategy == Strategy::MinHeight && I.ring.kind == RingKind::Padic);

    auto consider = [&](const Shell& sh, const std::vector<std::int64_t>& v) -> bool {
        if (I.budget && rec.examined >= I.budget) {
            exhausted = true;
            return false;
        }
        ++rec.examined;
        std::int64_t key = 0;
        bool ok;
        Rational height;
        if (I.ring.kind == RingKind::Laurent) {
            ok = laurent_evaluate(I.ring, A, sh, v, I.m, I.n, key, nullptr);
            height = sh.height;
        } else if (I.ring.kind == RingKind::Padic && strategy == Strategy::MinHeight) {
            Detail d;
            ok = I.evaluate(loaded, sh, v, key, &d);
            height = d.height;
        } else {
            ok = I.evaluate(loaded, sh, v, key, nullptr);
        }
        if (!ok)
            return true;
        bool better = !best.have;
        if (best.have && strategy == Strategy::MinError)
            better = key < best.key;
        if (best.have && strategy == Strategy::MinHeight)
            better = height < best.height;
        if (better) {
            best.have = true;
            best.key = key;
            best.height = height;
            best.v = v;
            best.shell = &sh;
        }
        return full;
    };

    if (I.weight) {
        const Shell& sh = I.shells.front();
        std::vector<std::pair<QuasiNorm, std::vector<std::int64_t>>> all;
        auto collect = [&](const std::vector<std::int64_t>& v) {
            all.emplace_back(quasi_norm(v, *I.weight), v);
            return true;
        };
        Impl copy = I;
        copy.cumulative = true;
        copy.walk(sh, collect);
        std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            int c = compare(a.first.value(), b.first.value());
            return c != 0 ? c < 0 : a.second < b.second;
        });
        for (const auto& [norm, v] : all)
            if (!consider(sh, v))
                break;
        if (best.have)
            rec.weighted_height = quasi_norm(best.v, *I.weight).value();
    } else {
        for (const auto& sh : I.shells) {
            bool more = I.ring.kind == RingKind::Laurent ? laurent_walk(I.ring.field(), I.m, sh, [&](const auto& v) { return consider(sh, v); })
                                                         : I.walk(sh, [&](const auto& v) { return consider(sh, v); });
            if (!more && (exhausted || !full))
                break;
        }
    }

    if (best.have) {
        Detail d;
        std::int64_t key = 0;
        if (I.ring.kind == RingKind::Laurent) {
            laurent_evaluate(I.ring, A, *best.shell, best.v, I.m, I.n, key, &d);
            for (int k = 0; k < I.m; ++k)
                rec.q.push_back(IntegerPoint::polynomial(laurent_poly(best.v, k, static_cast<int>(best.shell->level))));
        } else {
            I.evaluate(loaded, *best.shell, best.v, key, &d);
            rec.q = I.q_points(best.v);
        }
        rec.p = std::move(d.p);
        rec.errors = std::move(d.errors);
        rec.height = d.height;
    }
    if (exhausted)
        rec.status = SolveStatus::SearchExhausted;
    else
        rec.status = best.have ? SolveStatus::Found : SolveStatus::CertifiedNone;
    return rec;
}

ShellScan PreparedSearch::scan(const Matrix& A) const
{
    const Impl& I = *impl_;
    require(!I.weight, "shell scans use sup-norm shells");
    auto loaded = I.load(A);
    ShellScan out;
    for (const auto& sh : I.shells) {
        bool hit = false;
        auto probe = [&](const std::vector<std::int64_t>& v) {
            if (I.budget && out.examined >= I.budget) {
                out.exhausted = true;
                return false;
            }
            ++out.examined;
            std::int64_t key = 0;
            hit = I.ring.kind == RingKind::Laurent ? laurent_evaluate(I.ring, A, sh, v, I.m, I.n, key, nullptr)
                                                   : I.evaluate(loaded, sh, v, key, nullptr);
            return !hit;
        };
        if (I.ring.kind == RingKind::Laurent)
            laurent_walk(I.ring.field(), I.m, sh, probe);
        else
            I.walk(sh, probe);
        if (out.exhausted)
            break;
        if (hit) {
            if (!out.any)
                out.first = sh.height;
            out.any = true;
            out.last = sh.height;
            ++out.hit_shells;
        }
    }
    return out;
}

SolutionRecord solve(const LinearFormSystem& sys, Strategy strategy)
{
    return PreparedSearch(sys).solve(sys.A, strategy);
}

// ---------------------------------------------------------------- verification

namespace {

Integer padic_value(const AmbientPoint& x, std::uint64_t p, int L)
{
    Integer v(0);
    for (int i = L - 1; i >= 0; --i)
        v = v * static_cast<unsigned long>(p) + x.digits[static_cast<std::size_t>(i)];
    return v;
}

std::vector<Rational> coords_of(const IntegerPoint& z)
{
    switch (z.kind) {
    case RingKind::Complex: return {Rational(z.c[0]), Rational(z.c[1])};
    case RingKind::Quaternion: return {Rational(z.c[0], 2), Rational(z.c[1], 2), Rational(z.c[2], 2), Rational(z.c[3], 2)};
    default: return {Rational(z.c[0])};
    }
}

} // namespace

bool verify_solution(const LinearFormSystem& sys, const SolutionRecord& rec)
{
    if (!rec.found())
        return false;
    const auto& ring = sys.ring;
    const int m = sys.m(), n = sys.n();
    if (static_cast<int>(rec.q.size()) != m || static_cast<int>(rec.p.size()) != n || static_cast<int>(rec.errors.size()) != n)
        return false;
    bool nonzero = false;
    for (const auto& z : rec.q)
        nonzero = nonzero || !z.is_zero();
    if (!nonzero)
        return false;
    std::vector<PowerProduct> bounds = sys.shell_bounds ? broadcast(sys.shell_bounds(rec.height), n, "shell bounds")
                                                        : broadcast(sys.error_bounds, n, "error_bounds");

    // heights
    Rational top(0);
    for (int k = 0; k < m; ++k) {
        Rational h;
        const auto& z = rec.q[std::size_t(k)];
        if (ring.kind == RingKind::Laurent) {
            h = z.poly.empty() ? Rational(0) : int_pow_rational(ring.t, static_cast<long>(z.poly.size() - 1));
        } else {
            for (const auto& c : coords_of(z))
                h = std::max(h, Rational(abs(c)));
        }
        top = std::max(top, h);
        const auto& caps = sys.height_bounds;
        const auto& cap = caps.size() == 1 ? caps[0] : caps[std::size_t(k)];
        if (compare(cap, h) < 0)
            return false;
    }

    for (int j = 0; j < n; ++j) {
        NormValue err;
        switch (ring.kind) {
        case RingKind::Real:
        case RingKind::Complex:
        case RingKind::Quaternion: {
            std::array<Rational, 4> acc{};
            for (int k = 0; k < m; ++k) {
                const auto& x = sys.A.at(k, j);
                std::array<Rational, 4> xa{}, qa{};
                auto qc = coords_of(rec.q[std::size_t(k)]);
                for (int c = 0; c < ring.components(); ++c) {
                    xa[std::size_t(c)] = x.coordinate(c);
                    qa[std::size_t(c)] = qc[std::size_t(c)];
                }
                auto prod = sys.right_multiply ? quaternion_mul(xa, qa) : quaternion_mul(qa, xa);
                for (int c = 0; c < 4; ++c)
                    acc[std::size_t(c)] += prod[std::size_t(c)];
            }
            auto pc = coords_of(rec.p[std::size_t(j)]);
            Rational e(0);
            for (int c = 0; c < ring.components(); ++c)
                e = std::max(e, Rational(abs(acc[std::size_t(c)] - pc[std::size_t(c)])));
            err = {e, false};
            break;
        }
        case RingKind::Padic: {
            const auto& P = sys.ring.p;
            Integer s = rec.p[std::size_t(j)].c[0];
            for (int k = 0; k < m; ++k)
                s += Integer(static_cast<long>(rec.q[std::size_t(k)].c[0])) * padic_value(sys.A.at(k, j), P, ring.precision);
            Integer mod = integer_pow(P, static_cast<unsigned long>(ring.precision));
            Integer r = s % mod;
            if (r < 0)
                r += mod;
            if (r == 0) {
                err = {int_pow_rational(P, -ring.precision), true};
            } else {
                long v = 0;
                while (r % static_cast<unsigned long>(P) == 0) {
                    r /= static_cast<unsigned long>(P);
                    ++v;
                }
                err = {int_pow_rational(P, -v), false};
            }
            break;
        }
        case RingKind::Laurent: {
            const auto& F = ring.field();
            const int d = static_cast<int>(top == 0 ? 0 : floor_log(top, ring.t));
            std::vector<std::uint32_t> frac(static_cast<std::size_t>(ring.precision), 0);
            for (int k = 0; k < m; ++k) {
                const auto& q = rec.q[std::size_t(k)].poly;
                const auto& a = sys.A.at(k, j).digits;
                for (std::size_t l = 0; l < q.size(); ++l)
                    for (int i = 1; i + static_cast<int>(l) <= ring.precision; ++i)
                        frac[std::size_t(i - 1)] = F.add(frac[std::size_t(i - 1)], F.mul(q[l], a[std::size_t(i) + l - 1]));
            }
            int first = 0;
            for (int i = 1; i <= ring.precision - d && first == 0; ++i)
                if (frac[std::size_t(i - 1)] != 0)
                    first = i;
            err = first == 0 ? NormValue{int_pow_rational(ring.t, -(ring.precision - d)), true}
                             : NormValue{int_pow_rational(ring.t, -first), false};
            break;
        }
        }
        const auto& stored = rec.errors[std::size_t(j)];
        if (stored.value != err.value || stored.below_floor != err.below_floor)
            return false;
        if (compare(bounds[std::size_t(j)], err.value) <= 0)
            return false;
        if (ring.kind == RingKind::Padic && sys.height_bounds.size() > 1 && !sys.shell_bounds) {
            auto caps = broadcast(sys.height_bounds, m + n, "height_bounds");
            if (compare(caps[std::size_t(m + j)], Rational(iabs(rec.p[std::size_t(j)].c[0]))) < 0)
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- certification

PreconditionCheck check_minkowski_precondition(const RingDescriptor& ring, int m, int n,
                                               const std::vector<PowerProduct>& error_bounds,
                                               const std::vector<PowerProduct>& height_bounds, CertifyPolicy policy)
{
    ring.validate();
    require(m >= 1 && n >= 1, "shape must be positive");
    auto gamma = broadcast(error_bounds, n, "error_bounds");
    PreconditionCheck out;
    std::ostringstream why;
    PowerProduct g, th;
    for (const auto& x : gamma)
        g *= x;
    switch (ring.kind) {
    case RingKind::Real:
    case RingKind::Complex:
    case RingKind::Quaternion: {
        auto theta = broadcast(height_bounds, m, "height_bounds");
        for (const auto& x : theta)
            th *= x;
        PowerProduct prod = g * th;
        PowerProduct need;
        if (ring.kind == RingKind::Quaternion)
            need = PowerProduct::of(2).pow(policy == CertifyPolicy::Sound ? Rational(-(m + n), 4) : Rational(-(m + n)));
        bool product_ok = prod >= need;
        why << "product " << prod.to_string() << (product_ok ? " >= " : " < ") << need.to_string();
        out.met = product_ok;
        if (policy == CertifyPolicy::Sound) {
            // q = 0 must force p = 0
            PowerProduct cell = ring.kind == RingKind::Quaternion ? PowerProduct::of(Rational(1, 2)) : PowerProduct();
            for (int j = 0; j < n; ++j)
                if (gamma[std::size_t(j)] > cell) {
                    out.met = false;
                    why << "; error bound " << j + 1 << " exceeds " << cell.to_string();
                }
        }
        break;
    }
    case RingKind::Padic: {
        auto H = broadcast(height_bounds, m + n, "height_bounds");
        PowerProduct hp;
        for (const auto& x : H)
            hp *= x;
        if (policy == CertifyPolicy::AsStated) {
            PowerProduct need = PowerProduct::of(ring.p).pow(Rational(-n)) / hp;
            out.met = g >= need;
            why << "product of error bounds " << g.to_string() << (out.met ? " >= " : " < ") << need.to_string();
            break;
        }
        PowerProduct index;
        out.met = true;
        for (int j = 0; j < n; ++j) {
            long k = strict_exponent(gamma[std::size_t(j)], ring.p);
            PowerProduct pk = PowerProduct::of(ring.p).pow(Rational(k));
            index *= pk;
            if (!(pk > H[std::size_t(m + j)])) {
                out.met = false;
                why << "companion cap " << j + 1 << " reaches p^" << k << "; ";
            }
        }
        bool volume = index <= hp;
        out.met = out.met && volume;
        why << "lattice index " << index.to_string() << (volume ? " <= " : " > ") << "box " << hp.to_string();
        break;
    }
    case RingKind::Laurent: {
        auto theta = broadcast(height_bounds, m, "height_bounds");
        if (policy == CertifyPolicy::AsStated) {
            for (const auto& x : theta)
                th *= x;
            PowerProduct need = PowerProduct::of(ring.t).pow(Rational(n + m));
            out.met = g * th >= need;
            why << "product " << (g * th).to_string() << (out.met ? " >= " : " < ") << need.to_string();
            break;
        }
        long unknowns = 0, equations = 0;
        for (const auto& x : theta)
            unknowns += log_floor(x, ring.t) + 1;
        for (const auto& x : gamma)
            equations += std::max(0L, strict_exponent(x, ring.t) - 1);
        out.met = unknowns > equations;
        why << unknowns << " free coefficients against " << equations << " vanishing conditions";
        break;
    }
    }
    out.detail = why.str();
    return out;
}

CertificationReport certify_minkowski(const RingDescriptor& ring, int m, int n,
                                      const std::vector<PowerProduct>& error_bounds,
                                      const std::vector<PowerProduct>& height_bounds, int trials, std::uint64_t seed,
                                      CertifyPolicy policy)
{
    require(trials >= 1, "trials must be positive");
    CertificationReport out;
    out.trials = trials;
    out.precondition = check_minkowski_precondition(ring, m, n, error_bounds, height_bounds, policy);
    if (!out.precondition.met)
        fail(ErrorCode::PreconditionUnmet, "Minkowski precondition fails: " + out.precondition.detail);
    LinearFormSystem shape;
    shape.ring = ring;
    shape.A.rows = m;
    shape.A.cols = n;
    shape.error_bounds = error_bounds;
    shape.height_bounds = height_bounds;
    PreparedSearch search(shape);
    for (int trial = 0; trial < trials; ++trial) {
        Matrix A = sample_uniform(ring, m, n, derive_seed(seed, static_cast<std::uint64_t>(trial)));
        auto rec = search.solve(A, Strategy::FirstFound);
        out.examined += rec.examined;
        if (rec.status == SolveStatus::Found)
            ++out.found;
        else
            out.failures.push_back(trial);
    }
    return out;
}

// ---------------------------------------------------------------- resonant sets

namespace {

// Integers z with lo < z < hi and |z| <= cap.
Integer count_open(const Rational& lo, const Rational& hi, std::int64_t cap)
{
    Integer a = lo.get_num() / lo.get_den(); // truncation, adjust to floor
    Rational fa(a);
    if (fa > lo)
        a -= 1;
    // first integer strictly above lo
    Integer first = a + 1;
    Integer b;
    mpz_cdiv_q(b.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    Integer last = b - 1; // last integer strictly below hi
    Integer c(static_cast<long>(cap));
    first = std::max(first, Integer(-c));
    last = std::min(last, c);
    return last >= first ? Integer(last - first + 1) : Integer(0);
}

} // namespace

Integer enumerate_resonant_neighborhood_hits(const ResonantQuery& query)
{
    const auto& ring = query.ring;
    ring.validate();
    const int m = static_cast<int>(query.q.size());
    require(m >= 1 && query.center.rows == m, "q length must match the centre rows");
    const int n = query.center.cols;
    require(query.radius > 0, "radius must be positive");
    require(query.height_cap >= 0, "height cap must be nonnegative");
    std::vector<Rational> delta = query.thickening;
    if (delta.size() == 1)
        delta.assign(std::size_t(n), delta[0]);
    require(static_cast<int>(delta.size()) == n, "thickening needs n entries");
    for (const auto& d : delta)
        require(d >= 0 && d < query.radius, "thickening must lie in [0, radius)");
    bool nonzero = false;
    for (const auto& z : query.q)
        nonzero = nonzero || !z.is_zero();
    require(nonzero, "q must be nonzero");

    Integer total(1);
    switch (ring.kind) {
    case RingKind::Real: {
        Rational norm1(0);
        for (const auto& z : query.q)
            norm1 += Rational(iabs(z.c[0]));
        for (int j = 0; j < n; ++j) {
            Rational centre(0);
            for (int k = 0; k < m; ++k)
                centre += Rational(query.q[std::size_t(k)].c[0]) * query.center.at(k, j).coordinate(0);
            Rational w = (query.radius + delta[std::size_t(j)]) * norm1;
            total *= count_open(centre - w, centre + w, query.height_cap);
        }
        return total;
    }
    case RingKind::Complex: {
        for (int j = 0; j < n; ++j) {
            Rational cx(0), cy(0), wx(0), wy(0);
            std::vector<std::pair<Rational, Rational>> gens;
            Rational rho = query.radius + delta[std::size_t(j)];
            for (int k = 0; k < m; ++k) {
                const auto& z = query.q[std::size_t(k)];
                Rational a(z.c[0]), b(z.c[1]);
                Rational x = query.center.at(k, j).coordinate(0), y = query.center.at(k, j).coordinate(1);
                cx += a * x - b * y;
                cy += a * y + b * x;
                if (z.is_zero())
                    continue;
                gens.emplace_back(rho * a, rho * b);
                gens.emplace_back(-rho * b, rho * a);
                wx += rho * (abs(a) + abs(b));
                wy += rho * (abs(a) + abs(b));
            }
            Integer count(0);
            Integer x0, x1, y0, y1;
            mpz_fdiv_q(x0.get_mpz_t(), Rational(cx - wx).get_num_mpz_t(), Rational(cx - wx).get_den_mpz_t());
            mpz_cdiv_q(x1.get_mpz_t(), Rational(cx + wx).get_num_mpz_t(), Rational(cx + wx).get_den_mpz_t());
            mpz_fdiv_q(y0.get_mpz_t(), Rational(cy - wy).get_num_mpz_t(), Rational(cy - wy).get_den_mpz_t());
            mpz_cdiv_q(y1.get_mpz_t(), Rational(cy + wy).get_num_mpz_t(), Rational(cy + wy).get_den_mpz_t());
            Integer cap(static_cast<long>(query.height_cap));
            x0 = std::max(x0, Integer(-cap));
            y0 = std::max(y0, Integer(-cap));
            x1 = std::min(x1, cap);
            y1 = std::min(y1, cap);
            for (Integer px = x0; px <= x1; ++px)
                for (Integer py = y0; py <= y1; ++py) {
                    Rational dx = Rational(px) - cx, dy = Rational(py) - cy;
                    bool inside = true;
                    // interior of the zonotope: strict inequality along every edge normal
                    for (const auto& [gx, gy] : gens) {
                        Rational nx = -gy, ny = gx;
                        Rational support(0);
                        for (const auto& [hx, hy] : gens)
                            support += abs(nx * hx + ny * hy);
                        if (!(abs(nx * dx + ny * dy) < support)) {
                            inside = false;
                            break;
                        }
                    }
                    if (inside)
                        ++count;
                }
            total *= count;
        }
        return total;
    }
    case RingKind::Padic: {
        const std::uint64_t p = ring.p;
        const int L = ring.precision;
        long lambda = L;
        for (const auto& z : query.q)
            if (z.c[0] != 0) {
                long v = 0;
                std::int64_t x = iabs(z.c[0]);
                while (x % static_cast<std::int64_t>(p) == 0) {
                    x /= static_cast<std::int64_t>(p);
                    ++v;
                }
                lambda = std::min(lambda, v);
            }
        for (int j = 0; j < n; ++j) {
            Rational R = std::max(query.radius, delta[std::size_t(j)]);
            // |q.X_j + a|_p <= R p^-lambda  <=>  valuation >= need
            long need = lambda;
            while (int_pow_rational(p, -need) > R * int_pow_rational(p, -lambda))
                ++need;
            if (need > L)
                fail(ErrorCode::PrecisionExhausted, "resonant neighbourhood finer than the p-adic precision");
            Integer mod = integer_pow(p, static_cast<unsigned long>(need));
            Integer s(0);
            for (int k = 0; k < m; ++k)
                s += Integer(static_cast<long>(query.q[std::size_t(k)].c[0])) * padic_value(query.center.at(k, j), p, L);
            Integer c = (-s) % mod;
            if (c < 0)
                c += mod;
            // a = c + mod * t with |a| <= U
            Integer U(static_cast<long>(query.height_cap));
            Integer lo, hi;
            Integer numlo = -U - c, numhi = U - c;
            mpz_cdiv_q(lo.get_mpz_t(), numlo.get_mpz_t(), mod.get_mpz_t());
            mpz_fdiv_q(hi.get_mpz_t(), numhi.get_mpz_t(), mod.get_mpz_t());
            total *= hi >= lo ? Integer(hi - lo + 1) : Integer(0);
        }
        return total;
    }
    case RingKind::Quaternion:
    case RingKind::Laurent: break;
    }
    fail(ErrorCode::InvalidArgument, std::string("resonant neighbourhood counts are not available for the ") +
                                         ring_kind_name(ring.kind) + " ring");
}

// ---------------------------------------------------------------- ubiquity

UbiquityReport empirical_ubiquity_check(const ApproxSpec& spec, const BalancedRho& rho, const UbiquityOptions& options)
{
    spec.validate();
    require(spec.m == 1 && spec.n == 2, "the ubiquity check covers the real case m = 1, n = 2");
    require(options.k >= 1 && options.k <= spec.k_max, "k must lie within the schedule");
    require(options.samples >= 1, "need at least one sample");
    require(options.center.size() == 2, "centre needs two coordinates");
    require(options.radius > 0, "radius must be positive");
    UbiquityReport out;
    out.samples = options.samples;
    if (!options.rho_override.empty()) {
        require(options.rho_override.size() == 2, "rho override needs two entries");
        for (const auto& r : options.rho_override)
            out.rho.push_back(static_cast<long double>(r.get_d()));
    } else {
        const RhoRow* row = nullptr;
        for (const auto& r : rho.rows)
            if (r.k == options.k)
                row = &r;
        require(row != nullptr, "no balanced row at k = " + std::to_string(options.k));
        for (const auto& r : row->rho)
            out.rho.push_back(std::exp2(r.log2()));
    }
    long double scale = options.rho_scale ? static_cast<long double>(options.rho_scale->get_d())
                                          : static_cast<long double>(spec.M);
    if (!options.rho_override.empty() && !options.rho_scale)
        scale = 1;
    Integer top = integer_pow(spec.M, static_cast<unsigned long>(options.k));
    require(top < Integer(1UL << 40), "schedule point too large for the Monte Carlo check");
    out.q_hi = static_cast<std::uint64_t>(top.get_ui());
    out.q_lo = options.full_window ? 1 : out.q_hi / spec.M;
    const long double c0 = options.center[0].get_d(), c1 = options.center[1].get_d(), r = options.radius.get_d();
    for (std::uint64_t s = 0; s < options.samples; ++s) {
        Rng rng(derive_seed(options.seed, s));
        long double x0 = c0 + r * (2 * static_cast<long double>(rng.unit()) - 1);
        long double x1 = c1 + r * (2 * static_cast<long double>(rng.unit()) - 1);
        bool hit = false;
        for (std::uint64_t q = out.q_lo; q <= out.q_hi && !hit; ++q) {
            long double lq = static_cast<long double>(q);
            long double a = lq * x0, b = lq * x1;
            long double da = std::fabs(a - std::nearbyint(a)), db = std::fabs(b - std::nearbyint(b));
            hit = da < lq * scale * out.rho[0] && db < lq * scale * out.rho[1];
        }
        if (hit)
            ++out.covered;
    }
    out.fraction = static_cast<double>(out.covered) / static_cast<double>(out.samples);
    return out;
}

// ---------------------------------------------------------------- text

std::string solution_csv_header(int m, int n)
{
    std::string h = "status,height";
    for (int k = 1; k <= m; ++k)
        h += ",q" + std::to_string(k);
    for (int j = 1; j <= n; ++j)
        h += ",p" + std::to_string(j);
    for (int j = 1; j <= n; ++j)
        h += ",error" + std::to_string(j);
    return h;
}

std::string format_solution_csv(const SolutionRecord& rec, const RingDescriptor& ring)
{
    std::ostringstream os;
    os << status_name(rec.status) << ',' << (rec.found() ? format_rational(rec.height) : std::string());
    auto quoted = [](const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; };
    for (const auto& z : rec.q)
        os << ',' << quoted(format_integer(z, ring));
    for (const auto& z : rec.p)
        os << ',' << quoted(format_integer(z, ring));
    for (const auto& e : rec.errors)
        os << ',' << (e.below_floor ? "<" : "") << format_rational(e.value);
    return os.str();
}

} // namespace limsup
