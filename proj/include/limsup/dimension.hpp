#pragma once

#include "limsup/exact.hpp"

#include <string>
#include <vector>

namespace limsup {

struct DimensionProblem {
    std::vector<Rational> delta;
    Rational kappa;
    std::vector<Rational> a, t;
    void validate() const;
};

struct Partition {
    Rational A;
    std::vector<int> K1, K2, K3;
};

struct MtprResult {
    Rational value;
    std::vector<Partition> minimizers;                    // every candidate attaining the minimum
    std::vector<std::pair<Rational, Rational>> candidates; // (A, s) per distinct candidate
};

MtprResult mtpr_lower_bound(const DimensionProblem& prob);

enum class Setting { Real, TwoDim, Padic, Complex, Quaternion, Laurent };

const char* setting_name(Setting s);
Setting parse_setting(const std::string& text);

struct ClosedFormCase {
    Setting setting = Setting::Real;
    int m = 1, n = 1;
    std::vector<Rational> tau;

    void validate_shape() const;
    bool hypothesis_holds() const;
    void require_hypothesis() const; // throws HypothesisViolated
    Rational full_dimension() const;
    int scale() const;               // real coordinates per ring element: 1, 2 or 4
    Rational kappa() const;
    std::vector<Rational> effective_exponents() const; // 1 + tau for real settings, tau otherwise
    DimensionProblem problem(const std::vector<Rational>& a) const;
};

struct ClosedFormResult {
    Rational value;
    std::vector<int> argmin;          // every minimizing index
    bool hypothesis_violated = false; // value is then the full dimension
};

ClosedFormResult closed_form(const ClosedFormCase& c);

enum class ExponentCase { BallToRectangle, RectangleToRectangle };

struct ExponentSelection {
    std::vector<Rational> a, t;
    ExponentCase tag = ExponentCase::BallToRectangle;
    int split = 0;            // number of coordinates set to the balanced value
    Rational balanced;        // that balanced value
};

ExponentSelection select_exponents(const ClosedFormCase& c);

struct GridResult {
    Rational best;                  // over grid points plus the selected exponents
    std::vector<Rational> best_a;
    bool grid_nonempty = false;
    Rational grid_best;             // over grid points only
    std::vector<Rational> grid_best_a;
    std::size_t points = 0;
    bool box_relaxed = false;       // p-adic interior box was empty and replaced by positivity
};

GridResult grid_optimize_lower_bound(const ClosedFormCase& c, int resolution);

} // namespace limsup
