#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace dbvp {

/// One-sided data at an interior discontinuity candidate.
struct Breakpoint {
    double t = 0.0;
    double left = 0.0;   // limit from below
    double right = 0.0;  // limit from above
    double at = 0.0;     // value taken at t itself
};

/// Total-variation summary of a function on [0,1].
///
/// `value` is exact for step functions and piecewise-monotone closed forms;
/// otherwise it is a refined partition-sum estimate. When partition sums keep
/// growing instead of stabilizing, `unbounded_suspected` is set and `value`
/// holds the last partial sum.
struct TotalVariation {
    double value = 0.0;
    bool exact = false;
    bool unbounded_suspected = false;
    double endpoint_value_0 = 0.0;  // f(0)
    double endpoint_value_1 = 0.0;  // f(1)
};

/// Bracket for a sup norm: `lower` is always attained on the evaluation set;
/// `upper` is a certified bound when one is available (step functions,
/// monotone-piece closed forms, coefficient sums of series). `exact` means
/// lower == upper by construction, not by luck.
struct NormBracket {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
};

/// A real regulated function on [0,1]: finite one-sided limits everywhere,
/// with an explicit registry of interior breakpoints and optional endpoint
/// discontinuities (a value at 0 that differs from the right limit at 0, or
/// a value at 1 that differs from the left limit at 1).
///
/// Values are immutable after construction; all member functions are pure.
class RegulatedFn {
public:
    enum class Kind { closed_form, step, series, sampled };

    static RegulatedFn zero();
    static RegulatedFn constant(double c);

    /// Right-continuous unit step with jump at `center` in (0,1).
    static RegulatedFn heaviside(double center);

    /// Truncated Weierstrass-type series sum_{n=1..N} sin(7^n pi t)/2^n with
    /// N = ceil(log2(1/tolerance)); the dropped tail is bounded by 2^-N.
    static RegulatedFn weierstrass(double tolerance = 1e-12);

    /// Piecewise-constant function: value values[i] on [points[i-1], points[i])
    /// and values.back() on [points.back(), 1]. Stored right-continuous.
    /// `points` must be strictly increasing inside (0,1) and
    /// values.size() == points.size() + 1.
    static RegulatedFn step(std::vector<double> points, std::vector<double> values);

    /// Continuous closed form on [0,1]. `monotone_knots` (optional) lists the
    /// interior points splitting [0,1] into monotone pieces; when present,
    /// sup norm and total variation are computed exactly from piece endpoints.
    static RegulatedFn closed_form(std::function<double(double)> fn,
                                   std::vector<double> monotone_knots = {},
                                   double eval_tolerance = 1e-12);

    /// Piecewise-linear interpolant of samples, with one-sided values at the
    /// listed breakpoints (each breakpoint t must be a grid point).
    static RegulatedFn sampled(std::vector<double> grid, std::vector<double> values,
                               std::vector<Breakpoint> breaks = {});

    /// Replaces the value taken at t=0; `right_limit_0` is what eval tends to
    /// as t -> 0+. Used for functions discontinuous at the left endpoint.
    RegulatedFn with_value_at_0(double at0, double right_limit_0) const;
    RegulatedFn with_value_at_1(double at1, double left_limit_1) const;
    RegulatedFn with_breakpoints(std::vector<Breakpoint> breaks) const;

    /// Attaches a closed-form primitive A with A(t) = integral of this
    /// function over [0,t]. Factories register one automatically for step,
    /// constant, heaviside and weierstrass kinds; changing values on a set of
    /// measure zero (the with_* modifiers) keeps the primitive valid.
    RegulatedFn with_antiderivative(std::function<double(double)> a) const;

    /// The registered primitive, empty when none is known.
    const std::function<double(double)>& antiderivative() const { return antiderivative_; }

    /// Value at t. Throws std::domain_error outside [0,1].
    double eval(double t) const;

    /// One-sided limits; left_limit needs t in (0,1], right_limit t in [0,1).
    double left_limit(double t) const;
    double right_limit(double t) const;

    /// Max of |f| over a uniform grid of `grid_density` points joined with all
    /// breakpoints and their one-sided values. Exact for step functions and
    /// monotone-piece closed forms, a lower estimate otherwise.
    double sup_norm(int grid_density = default_grid_density) const;
    NormBracket sup_norm_bracket(int grid_density = default_grid_density) const;

    /// Partition-based total variation. Exact for step/monotone/sampled kinds;
    /// refinement starts at 64 points and doubles at most `refinement_limit`
    /// times, stabilization = relative change < 1e-6 between doublings.
    TotalVariation total_variation(int refinement_limit = default_refinement_limit,
                                   long max_partition_points = 2'000'000) const;

    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    Kind kind() const { return kind_; }
    double eval_tolerance() const { return eval_tolerance_; }

    /// Number of series terms kept (series kind only, 0 otherwise).
    int series_terms() const { return series_terms_; }

    /// Value taken at t=0 and the limit from the right of 0 (equal when the
    /// function is right-continuous at 0); same for t=1.
    double value_at_0() const;
    double right_limit_at_0() const;
    double value_at_1() const;
    double left_limit_at_1() const;

    static constexpr int default_grid_density = 10'000;
    static constexpr int default_refinement_limit = 16;

private:
    RegulatedFn() = default;

    double eval_unchecked(double t) const;
    double piece_value_left_of(double t) const;   // step kind helpers
    double piece_value_right_of(double t) const;

    Kind kind_ = Kind::closed_form;
    std::function<double(double)> fn_;            // closed_form / series
    std::function<double(double)> antiderivative_;
    std::vector<Breakpoint> breakpoints_;         // sorted, inside (0,1)
    std::vector<double> monotone_knots_;          // closed_form only
    std::vector<double> grid_, values_;           // sampled / step pieces
    double step_first_value_ = 0.0;               // step: value on [0, first point)
    std::optional<std::pair<double, double>> endpoint0_;  // {at, right limit}
    std::optional<std::pair<double, double>> endpoint1_;  // {at, left limit}
    double eval_tolerance_ = 1e-12;
    int series_terms_ = 0;
    double series_coeff_bound_ = 0.0;             // certified sup bound for series
};

/// Truncated Weierstrass series value at t with truncation error <= tolerance
/// (exact-arithmetic bound; double rounding of the arguments 7^n pi t adds
/// noise of order 1e-5 for n past ~18, each term still bounded by 2^-n).
double weierstrass_value(double t, double tolerance = 1e-12);

/// Number of terms kept for a given tolerance: ceil(log2(1/tolerance)).
int weierstrass_terms(double tolerance);

}  // namespace dbvp
