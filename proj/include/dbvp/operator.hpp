#pragma once

#include "dbvp/catalog.hpp"
#include "dbvp/integrate.hpp"
#include "dbvp/profile.hpp"
#include "dbvp/regulated.hpp"

#include <vector>

namespace dbvp {

/// Growth-bound data: |f(t,x)| is controlled by k(t)*|x| + h(t) and the
/// variation of g(t,.) by m. Both k and h must be nonnegative and
/// HK-integrable on [0,1].
struct BoundData {
    Integrand k;
    Integrand h;
    double m = 0.0;
};

/// Data of the boundary value problem
///   -D2x = f(t,x) + g(t,x) Du,   x(0) = beta Dx(0),   Dx(1) + Dx(eta) = 0,
/// with Du the distributional derivative of the regulated integrator u.
struct ProblemSpec {
    Integrand2 f;
    Integrand2 g;  // must vanish at t = 0 for every x
    RegulatedFn u = RegulatedFn::zero();
    double beta = 0.0;
    double eta = 0.0;
    BoundData bounds;
};

/// A candidate solution: x and its derivative Dx sampled on a common grid.
/// x is continuous (its jump entries are kink markers with equal one-sided
/// values); Dx genuinely jumps exactly where u does.
struct SolutionProfile {
    GridProfile x;
    GridProfile dx;
    double dx0 = 0.0;  // Dx(0)
    double x0 = 0.0;   // x(0) = beta * Dx(0)

    const std::vector<double>& grid() const { return x.grid; }
    double norm_x() const { return x.sup(); }

    static SolutionProfile zeros_on(std::vector<double> grid);
};

/// Sorted union of `base_points` uniform nodes on [0,1] with eta, the jump
/// points of u and the registered time-breakpoints of f and g.
std::vector<double> make_grid(const ProblemSpec& spec, int base_points = 1025);

/// Structural checks that do not require solving: eta in [0,1], beta finite,
/// m >= 0, and g(0,v) = 0 on a sample grid of v values. Throws
/// PreconditionError with a description on the first violation.
void validate_spec(const ProblemSpec& spec);

/// F(t,x) = integral of f(s, x(s)) over [0,t] on the grid of x. Uses the
/// registered antiderivative when f does not depend on x, cumulative
/// segment-wise adaptive quadrature otherwise (x read as piecewise linear
/// between nodes, one-sided values respected).
GridProfile profile_F(const ProblemSpec& spec, const SolutionProfile& x, double tol = 1e-10);

/// G_u(t,x) = Stieltjes integral of g(s, x(s)) against u over [0,t] on the
/// grid of x: jump sum (with the value-at-point convention of hks_integrate)
/// plus Riemann-Stieltjes quadrature against the continuous part of u.
/// One-sided values are recorded at every jump of u.
GridProfile profile_G(const ProblemSpec& spec, const SolutionProfile& x, double tol = 1e-10);

/// One application of the integral operator
///   Tx(t) = (t+beta)/2 * (F(1,x)+F(eta,x)+G(1,x)+G(eta,x))
///           - int_0^t F(s,x) ds - int_0^t G_u(s,x) ds,
/// returned on the grid of x together with DTx (no finite differencing),
/// DTx(0) and Tx(0) = beta * DTx(0). The bracket uses dedicated endpoint
/// integrations, never grid lookups.
SolutionProfile apply_T(const ProblemSpec& spec, const SolutionProfile& x, double tol = 1e-10);

/// Dx(t) = Dx(0) - F(t,x) - G_u(t,x) for the given profile, with one-sided
/// values inherited from the jumps of G_u and Dx(0) read from x.dx0.
GridProfile reconstruct_Dx(const ProblemSpec& spec, const SolutionProfile& x, double tol = 1e-10);

}  // namespace dbvp
