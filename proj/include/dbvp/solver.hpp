#pragma once

#include "dbvp/operator.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dbvp {

/// Quantitative hypothesis data for the contraction setup. smallness is
/// (|beta|+2)*norm_K and must be < 1; the ball radius is
/// (|beta|+2)*(norm_H + 2*m*norm_u) / (1 - smallness).
struct HypothesisReport {
    double norm_K = 0.0;  // max_t |int_0^t k|
    double norm_H = 0.0;  // max_t |int_0^t h|
    double norm_u = 0.0;  // sup |u|; the upper end when only a bracket is known
    double m = 0.0;       // uniform variation bound on g(t, .)
    double smallness = 0.0;
    bool condition_ok = false;
    double radius = 0.0;
    // Present when sup|u| itself is only bracketed: radius evaluated at the
    // lower and upper ends of that bracket.
    std::optional<std::pair<double, double>> radius_bracket;
};

struct SolveOptions {
    int grid = 1025;
    double tol = 1e-8;
    int max_iter = 200;
    double damping = 1.0;       // halves on residual increase, floor 0.125
    bool ignore_condition = false;
};

struct SolveResult {
    SolutionProfile solution;
    int iterations = 0;     // number of operator applications performed
    double residual = 0.0;  // sup |x_n - T x_n| over nodes and one-sided values
    std::array<double, 2> bc_residuals{0.0, 0.0};  // |x(0)-beta Dx(0)|, |Dx(1)+Dx(eta)|
    double norm_x = 0.0;
    bool within_ball = false;  // norm_x <= radius + tol
    bool converged = false;
    std::vector<double> residual_history;  // one entry per operator application
    HypothesisReport report;
};

/// Result of re-checking a candidate against a fresh operator application on
/// the midpoint-refined grid. Never throws: failures land in `error`.
struct VerifyReport {
    double residual = 0.0;
    std::array<double, 2> bc_residuals{0.0, 0.0};
    bool jumps_match = false;  // Dx jumps exactly where u does
    bool ok = false;
    std::string error;
};

/// Integrate the bound data k and h into their running integrals, take sup
/// norms over a 1025-point grid refined by their breakpoints, and evaluate
/// the smallness condition and ball radius. Uses exact antiderivatives when
/// registered. Throws PreconditionError when k or h is missing and
/// IntegrationError when one of them fails to integrate.
HypothesisReport check_hypotheses(const ProblemSpec& spec, double tol = 1e-9);

/// Damped fixed-point iteration x_{n+1} = (1-d) x_n + d T x_n from x_0 = 0.
/// Stops when the sup residual drops below options.tol; running out of
/// iterations is an honest non-converged result, not an error. Throws
/// PreconditionError when the smallness condition fails, unless
/// options.ignore_condition is set.
SolveResult solve(const ProblemSpec& spec, const SolveOptions& options = {});

/// Recompute T sol on the midpoint-refined grid and compare at the original
/// nodes and one-sided values; check both boundary conditions and that Dsol
/// jumps exactly at the jump points of u.
VerifyReport verify(const ProblemSpec& spec, const SolutionProfile& sol, double tol = 1e-8);

}  // namespace dbvp
