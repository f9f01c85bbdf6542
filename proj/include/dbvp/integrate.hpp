#pragma once

#include "dbvp/profile.hpp"
#include "dbvp/regulated.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbvp {

/// Quadrature failed to reach the requested tolerance.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The integrand violates a precondition (unbounded variation, misplaced
/// singular point, malformed limits).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntegralResult {
    enum class Method { antiderivative, adaptive, improper_limit, jump_sum_continuous };

    double value = 0.0;
    double error_estimate = 0.0;  // absolute
    Method method = Method::adaptive;
};

/// Display names: "antiderivative", "adaptive", "improper-limit",
/// "jump-sum+continuous-part".
std::string method_name(IntegralResult::Method m);

/// An integrand for hk_integrate. `fn` is always required. When an exact
/// antiderivative is known it short-circuits quadrature entirely; a singular
/// point marks an endpoint where fn is unbounded yet improperly integrable
/// (the improper limit coincides with the Kurzweil-Henstock value there).
struct Integrand {
    std::function<double(double)> fn;
    std::function<double(double)> antiderivative;  // empty when unknown
    std::optional<double> singular_point;
    std::vector<double> breakpoints;  // forced panel boundaries in (0,1)

    /// Copy with the antiderivative dropped, for exercising numeric paths.
    Integrand without_antiderivative() const;
};

/// Division points a = p0 < ... < pn = b with tags[i] in [p_i, p_{i+1}].
/// The convention for integrals against jumping integrators requires every
/// registered jump point inside (a,b) to appear as the tag of the subinterval
/// containing it; `uniform` enforces that for the points passed as
/// `forced_tags` by keeping them interior to exactly one subinterval.
struct TaggedPartition {
    std::vector<double> points;
    std::vector<double> tags;

    static TaggedPartition uniform(double a, double b, int segments,
                                   const std::vector<double>& forced_tags = {});

    /// Uniform refinement whose point set additionally contains
    /// `extra_points` (tags at midpoints, never at the extra points).
    static TaggedPartition with_points(double a, double b, int segments,
                                       const std::vector<double>& extra_points);

    bool has_tag(double t) const;
};

/// The Riemann-Stieltjes sum  sum_i g(tag_i) * (u(p_{i+1}) - u(p_i)).
double stieltjes_sum(const TaggedPartition& p, const std::function<double(double)>& g,
                     const std::function<double(double)>& u);

/// Integrate f over [a,b] in [0,1]. Paths, in order of preference:
/// antiderivative difference (exact), improper-limit extrapolation when the
/// registered singular point equals a, adaptive 15-point panels otherwise.
/// Throws IntegrationError when the requested tolerance is unreachable and
/// PreconditionError for malformed input (a > b, singular point interior to
/// (a,b), nonpositive tol).
IntegralResult hk_integrate(const Integrand& f, double a, double b, double tol);

/// Default-tolerance form: 1e-9 on smooth paths, relaxed to 1e-5 when the
/// call lands on the improper-limit path (the extrapolant-pair stall level
/// for the oscillatory catalog integrand sits near 3e-6, and cost grows
/// quadratically as the tolerance shrinks).
IntegralResult hk_integrate(const Integrand& f, double a, double b);

/// Stieltjes integral of g against the regulated integrator u over [a,b]:
/// the sum of jump contributions g(tau)*(u(tau+) - u(tau-)) plus quadrature
/// of g against the continuous part of u. At the limits, u(a-) reads as u(a)
/// and u(b+) as u(b). Exact (error 0) when u is a pure step function.
/// Throws PreconditionError when g's variation does not stabilize.
IntegralResult hks_integrate(const RegulatedFn& g, const RegulatedFn& u, double a, double b,
                             double tol = 1e-9);

/// Integrate a grid profile over [a,t] by jump-aware piecewise trapezoid;
/// exact for step and piecewise-linear profiles. error_estimate compares
/// against the coarsened (every-other-node) sum.
IntegralResult iterated_integrate(const GridProfile& F, double a, double t, double tol = 1e-9);

}  // namespace dbvp
