#pragma once

#include "dbvp/integrate.hpp"
#include "dbvp/regulated.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace dbvp {

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bivariate integrand (t, x-value) -> real for the forcing terms f and g.
/// When the expression does not involve x, the t-only views are populated so
/// callers can reuse exact antiderivatives and regulated-function structure.
struct Integrand2 {
    std::function<double(double, double)> fn;
    bool depends_on_x = true;
    std::optional<Integrand> time_part;         // set iff !depends_on_x
    std::optional<RegulatedFn> time_regulated;  // set iff !depends_on_x
    std::string name;
};

/// Univariate catalog. Accepted names:
///   zero | one | const(c) | heaviside(center) | weierstrass(tolerance) |
///   step(p1,p2,..;v0,v1,..) | expr(id) | id
/// with id one of {k41, h42, gstar}:
///   k41(t)   = 1/(3*sqrt(5+t))
///   h42(t)   = 1 + 2t*sin(1/t^2) - (2/t)*cos(1/t^2), h42(0) = 0
///   gstar(t) = 0 at t=0, 1 on (0,1]
RegulatedFn make_regulated(const std::string& name);

/// Same names as make_regulated, packaged for hk_integrate. Closed-form
/// antiderivatives are registered where known (zero, one, const, heaviside,
/// step, weierstrass, k41, h42, gstar); h42 also carries its singular point 0.
Integrand make_integrand(const std::string& name);

/// Bivariate catalog: every univariate name read as a t-only function, plus
///   f41(t,x) = x*sin(x)/(3*sqrt(5+t)).
Integrand2 make_integrand2(const std::string& name);

}  // namespace dbvp
