#include "limsup/dimension.hpp"
#include "limsup/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace limsup {

void DimensionProblem::validate() const
{
    require(!delta.empty(), "dimension problem needs at least one factor");
    require(delta.size() == a.size() && a.size() == t.size(), "delta, a and t must have equal length");
    require(kappa >= 0 && kappa < 1, "kappa must lie in [0, 1)");
    for (std::size_t j = 0; j < delta.size(); ++j) {
        require(delta[j] > 0, "delta must be positive");
        require(a[j] > 0, "a must be positive");
        require(t[j] >= 0, "t must be nonnegative");
    }
}

MtprResult mtpr_lower_bound(const DimensionProblem& prob)
{
    prob.validate();
    std::set<Rational> pool;
    for (std::size_t j = 0; j < prob.a.size(); ++j) {
        pool.insert(prob.a[j]);
        pool.insert(prob.a[j] + prob.t[j]);
    }
    MtprResult out;
    bool first = true;
    for (const auto& A : pool) {
        Partition part;
        part.A = A;
        Rational s(0), k3_delta(0), k3_a(0), k2_t(0);
        for (std::size_t j = 0; j < prob.a.size(); ++j) {
            int idx = static_cast<int>(j);
            if (prob.a[j] >= A) {
                part.K1.push_back(idx);
                s += prob.delta[j];
            } else if (prob.a[j] + prob.t[j] <= A) {
                part.K2.push_back(idx);
                s += prob.delta[j];
                k2_t += prob.t[j] * prob.delta[j];
            } else {
                part.K3.push_back(idx);
                k3_delta += prob.delta[j];
                k3_a += prob.a[j] * prob.delta[j];
            }
        }
        s += prob.kappa * k3_delta + (1 - prob.kappa) * (k3_a - k2_t) / A;
        out.candidates.emplace_back(A, s);
        if (first || s < out.value) {
            out.value = s;
            out.minimizers.clear();
            first = false;
        }
        if (s == out.value)
            out.minimizers.push_back(std::move(part));
    }
    return out;
}

const char* setting_name(Setting s)
{
    switch (s) {
    case Setting::Real: return "real";
    case Setting::TwoDim: return "twodim";
    case Setting::Padic: return "padic";
    case Setting::Complex: return "complex";
    case Setting::Quaternion: return "quaternion";
    case Setting::Laurent: return "laurent";
    }
    return "?";
}

Setting parse_setting(const std::string& text)
{
    for (Setting s : {Setting::Real, Setting::TwoDim, Setting::Padic, Setting::Complex, Setting::Quaternion,
                      Setting::Laurent})
        if (text == setting_name(s))
            return s;
    fail(ErrorCode::ParseError, "unknown setting '" + text + "'");
}

void ClosedFormCase::validate_shape() const
{
    require(m >= 1 && n >= 1, "m and n must be positive");
    if (setting == Setting::TwoDim)
        require(m == 1 && n == 2, "the two-dimensional simultaneous setting has m = 1, n = 2");
    require(static_cast<int>(tau.size()) == n, "need exactly n exponents");
}

bool ClosedFormCase::hypothesis_holds() const
{
    validate_shape();
    Rational sum = std::accumulate(tau.begin(), tau.end(), Rational(0));
    Rational lowest = *std::min_element(tau.begin(), tau.end());
    switch (setting) {
    case Setting::Real:
    case Setting::TwoDim: return lowest > 0 && sum > m;
    case Setting::Padic: return lowest > 1 && sum > m + n;
    case Setting::Complex:
    case Setting::Quaternion:
    case Setting::Laurent: return lowest > 1 && sum >= m + n;
    }
    return false;
}

void ClosedFormCase::require_hypothesis() const
{
    if (!hypothesis_holds())
        fail(ErrorCode::HypothesisViolated, std::string("exponents ") + format_rational_list(tau) +
                                                " violate the " + setting_name(setting) + " hypothesis");
}

int ClosedFormCase::scale() const
{
    switch (setting) {
    case Setting::Complex: return 2;
    case Setting::Quaternion: return 4;
    default: return 1;
    }
}

Rational ClosedFormCase::full_dimension() const { return Rational(scale() * m * n); }

Rational ClosedFormCase::kappa() const { return Rational(m - 1, m); }

std::vector<Rational> ClosedFormCase::effective_exponents() const
{
    std::vector<Rational> T = tau;
    if (setting == Setting::Real || setting == Setting::TwoDim)
        for (auto& x : T)
            x += 1;
    return T;
}

DimensionProblem ClosedFormCase::problem(const std::vector<Rational>& a) const
{
    validate_shape();
    require(static_cast<int>(a.size()) == n, "need n ubiquity exponents");
    DimensionProblem prob;
    prob.kappa = kappa();
    prob.delta.assign(static_cast<std::size_t>(n), Rational(scale() * m));
    prob.a = a;
    auto T = effective_exponents();
    for (int j = 0; j < n; ++j)
        prob.t.push_back(T[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)]);
    return prob;
}

ClosedFormResult closed_form(const ClosedFormCase& c)
{
    ClosedFormResult out;
    if (!c.hypothesis_holds()) {
        out.value = c.full_dimension();
        out.hypothesis_violated = true;
        return out;
    }
    const Rational cd(c.scale());
    const bool real_kind = c.setting == Setting::Real || c.setting == Setting::TwoDim;
    for (int k = 0; k < c.n; ++k) {
        const Rational& tk = c.tau[static_cast<std::size_t>(k)];
        Rational excess(0);
        for (const auto& tj : c.tau)
            if (tj < tk)
                excess += tk - tj;
        Rational v = real_kind ? Rational(c.n * (c.m - 1) + (c.n + c.m + excess) / (1 + tk))
                               : Rational(cd * c.n * (c.m - 1) + cd * (c.n + c.m + excess) / tk);
        if (out.argmin.empty() || v < out.value) {
            out.value = v;
            out.argmin.clear();
        }
        if (v == out.value)
            out.argmin.push_back(k);
    }
    return out;
}

ExponentSelection select_exponents(const ClosedFormCase& c)
{
    c.require_hypothesis();
    auto T = c.effective_exponents();
    const int n = c.n;
    const Rational total(c.n + c.m);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return T[static_cast<std::size_t>(x)] > T[static_cast<std::size_t>(y)]; });
    auto Ts = [&](int i) -> const Rational& { return T[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]; };

    ExponentSelection sel;
    sel.a.assign(static_cast<std::size_t>(n), Rational(0));
    Rational even = total / n;
    if (Ts(n - 1) >= even) {
        sel.tag = ExponentCase::BallToRectangle;
        sel.split = n;
        sel.balanced = even;
        std::fill(sel.a.begin(), sel.a.end(), even);
    } else {
        sel.tag = ExponentCase::RectangleToRectangle;
        bool found = false;
        for (int u = 1; u < n && !found; ++u) {
            Rational rest(0);
            for (int i = u; i < n; ++i)
                rest += Ts(i);
            Rational D = (total - rest) / u;
            if (Ts(u - 1) > D && D >= Ts(u)) {
                found = true;
                sel.split = u;
                sel.balanced = D;
                for (int i = 0; i < n; ++i)
                    sel.a[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i < u ? D : Ts(i);
            }
        }
        if (!found) {
            // Boundary: the exponents already sum to n + m.
            Rational sum = std::accumulate(T.begin(), T.end(), Rational(0));
            require(sum == total, "no balanced split exists for these exponents");
            sel.split = 0;
            sel.balanced = 0;
            sel.a = T;
        }
    }
    Rational check = std::accumulate(sel.a.begin(), sel.a.end(), Rational(0));
    require(check == total, "selected exponents do not sum to n + m");
    for (int j = 0; j < n; ++j)
        sel.t.push_back(T[static_cast<std::size_t>(j)] - sel.a[static_cast<std::size_t>(j)]);
    return sel;
}

GridResult grid_optimize_lower_bound(const ClosedFormCase& c, int resolution)
{
    require(resolution >= 8, "grid resolution must be at least 8 steps");
    c.require_hypothesis();
    auto T = c.effective_exponents();
    const int n = c.n, m = c.m;
    Rational sumT = std::accumulate(T.begin(), T.end(), Rational(0));
    for (const auto& x : T)
        if (x < 1)
            fail(ErrorCode::EmptyAdmissibleSet, "an effective exponent is below 1");
    if (sumT < n + m)
        fail(ErrorCode::EmptyAdmissibleSet, "effective exponents sum below n + m");

    GridResult out;
    // The p-adic interior box (1, m-1)^n meets the simplex only when n < n+m < n(m-1).
    bool use_box = false;
    if (c.setting == Setting::Padic) {
        use_box = m > 2 && n + m < n * (m - 1);
        out.box_relaxed = !use_box;
    }

    auto consider = [&](const std::vector<Rational>& a, bool grid_point) {
        Rational v = mtpr_lower_bound(c.problem(a)).value;
        if (grid_point) {
            if (!out.grid_nonempty || v > out.grid_best) {
                out.grid_best = v;
                out.grid_best_a = a;
            }
            out.grid_nonempty = true;
            ++out.points;
        }
        if (out.best_a.empty() || v > out.best) {
            out.best = v;
            out.best_a = a;
        }
    };

    std::vector<int> k(static_cast<std::size_t>(n), 0);
    std::vector<Rational> a(static_cast<std::size_t>(n));
    auto admissible = [&](int i, int steps) {
        Rational ai = 1 + ratio(m * steps, resolution);
        if (ai > T[static_cast<std::size_t>(i)])
            return false;
        if (use_box && (ai <= 1 || ai >= m - 1))
            return false;
        a[static_cast<std::size_t>(i)] = ai;
        return true;
    };
    auto walk = [&](auto&& self, int i, int left) -> void {
        if (i == n - 1) {
            if (admissible(i, left))
                consider(a, true);
            return;
        }
        for (int s = 0; s <= left; ++s)
            if (admissible(i, s))
                self(self, i + 1, left - s);
    };
    walk(walk, 0, resolution);

    consider(select_exponents(c).a, false);
    return out;
}

} // namespace limsup
