#include "dbvp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbvp {

namespace {

// Max |int_0^t f| over a 1025-point grid refined by f's breakpoints.
double prefix_norm(const Integrand& f, double tol, const char* which) {
    if (!f.fn && !f.antiderivative) {
        throw PreconditionError(std::string("check_hypotheses: bound ") + which + " is missing");
    }
    std::vector<double> grid;
    grid.reserve(1025 + f.breakpoints.size());
    for (int i = 0; i < 1025; ++i) grid.push_back(static_cast<double>(i) / 1024.0);
    grid.back() = 1.0;
    for (double t : f.breakpoints) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double best = 0.0;
    if (f.antiderivative) {
        const double a0 = f.antiderivative(0.0);
        for (double t : grid) best = std::max(best, std::abs(f.antiderivative(t) - a0));
        return best;
    }
    const double seg_tol = std::max(tol / static_cast<double>(grid.size()), 1e-12);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        acc += hk_integrate(f, grid[i], grid[i + 1], seg_tol).value;
        best = std::max(best, std::abs(acc));
    }
    return best;
}

// Sup distance between two profiles on the same grid, one-sided values
// included; a jump entry missing on one side reads as that node's value.
double profile_distance(const GridProfile& a, const GridProfile& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    }
    auto side_gap = [&](const GridProfile& p, const GridProfile& q) {
        for (const Breakpoint& j : p.jumps) {
            const Breakpoint* other = q.jump_at(j.t);
            const double ql = other ? other->left : q.value_at(j.t);
            const double qr = other ? other->right : q.value_at(j.t);
            d = std::max({d, std::abs(j.left - ql), std::abs(j.right - qr)});
        }
    };
    side_gap(a, b);
    side_gap(b, a);
    return d;
}

SolutionProfile blend(const SolutionProfile& x, const SolutionProfile& tx, double d) {
    if (d == 1.0) return tx;
    SolutionProfile out = tx;  // keeps tx's jump structure
    const double keep = 1.0 - d;
    for (std::size_t i = 0; i < out.x.values.size(); ++i) {
        out.x.values[i] = keep * x.x.values[i] + d * tx.x.values[i];
        out.dx.values[i] = keep * x.dx.values[i] + d * tx.dx.values[i];
    }
    out.dx0 = keep * x.dx0 + d * tx.dx0;
    out.x0 = keep * x.x0 + d * tx.x0;
    auto blend_jumps = [&](GridProfile& gp, const GridProfile& xs) {
        for (Breakpoint& j : gp.jumps) {
            const Breakpoint* xj = xs.jump_at(j.t);
            const double xl = xj ? xj->left : xs.value_at(j.t);
            const double xa = xj ? xj->at : xs.value_at(j.t);
            const double xr = xj ? xj->right : xs.value_at(j.t);
            j.left = keep * xl + d * j.left;
            j.at = keep * xa + d * j.at;
            j.right = keep * xr + d * j.right;
        }
    };
    blend_jumps(out.x, x.x);
    blend_jumps(out.dx, x.dx);
    return out;
}

std::array<double, 2> boundary_residuals(const ProblemSpec& spec, const SolutionProfile& sol) {
    const std::vector<double>& grid = sol.grid();
    auto it = std::lower_bound(grid.begin(), grid.end(), spec.eta);
    if (it == grid.end() || *it != spec.eta) {
        throw PreconditionError("boundary check: eta is not a grid node");
    }
    const std::size_t eta_i = static_cast<std::size_t>(it - grid.begin());
    const double bc1 = std::abs(sol.x.at(0) - spec.beta * sol.dx0);
    const double bc2 = std::abs(sol.dx.at(grid.size() - 1) + sol.dx.at(eta_i));
    return {bc1, bc2};
}

// Real jump locations of u, endpoint conventions included.
std::vector<double> u_jump_locations(const RegulatedFn& u) {
    std::vector<double> ts;
    if (u.right_limit_at_0() != u.value_at_0()) ts.push_back(0.0);
    for (const Breakpoint& b : u.breakpoints()) {
        if (b.right != b.left || b.at != b.left) ts.push_back(b.t);
    }
    if (u.value_at_1() != u.left_limit_at_1()) ts.push_back(1.0);
    return ts;
}

}  // namespace

HypothesisReport check_hypotheses(const ProblemSpec& spec, double tol) {
    HypothesisReport rep;
    rep.norm_K = prefix_norm(spec.bounds.k, tol, "k");
    rep.norm_H = prefix_norm(spec.bounds.h, tol, "h");
    rep.m = spec.bounds.m;
    const NormBracket nb = spec.u.sup_norm_bracket();
    rep.norm_u = nb.upper;

    const double scale = std::abs(spec.beta) + 2.0;
    rep.smallness = scale * rep.norm_K;
    rep.condition_ok = rep.smallness < 1.0;
    auto radius_at = [&](double norm_u) {
        return scale * (rep.norm_H + 2.0 * rep.m * norm_u) / (1.0 - rep.smallness);
    };
    rep.radius = rep.condition_ok ? radius_at(rep.norm_u) : 0.0;
    if (!nb.exact && rep.condition_ok) {
        rep.radius_bracket = {radius_at(nb.lower), radius_at(nb.upper)};
    }
    return rep;
}

SolveResult solve(const ProblemSpec& spec, const SolveOptions& options) {
    if (options.grid < 2) throw PreconditionError("solve: grid must have at least 2 points");
    if (!(options.tol > 0.0)) throw PreconditionError("solve: tol must be positive");
    if (options.max_iter < 1) throw PreconditionError("solve: max_iter must be at least 1");
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw PreconditionError("solve: damping must lie in (0,1]");
    }
    validate_spec(spec);

    SolveResult result;
    result.report = check_hypotheses(spec);
    if (!result.report.condition_ok && !options.ignore_condition) {
        throw PreconditionError("solve: smallness condition fails ((|beta|+2)*norm_K = " +
                                std::to_string(result.report.smallness) +
                                " >= 1); set ignore_condition to iterate anyway");
    }

    const double inner_tol = std::min(1e-10, 0.01 * options.tol);
    SolutionProfile x = SolutionProfile::zeros_on(make_grid(spec, options.grid));
    double damping = options.damping;
    double prev_residual = 0.0;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        SolutionProfile tx = apply_T(spec, x, inner_tol);
        const double res = profile_distance(x.x, tx.x);
        result.residual_history.push_back(res);
        result.iterations = iter;
        result.residual = res;
        if (res < options.tol || iter == options.max_iter) {
            result.solution = std::move(tx);
            result.converged = res < options.tol;
            break;
        }
        if (iter > 1 && res >= prev_residual) damping = std::max(0.5 * damping, 0.125);
        prev_residual = res;
        x = blend(x, tx, damping);
    }

    result.bc_residuals = boundary_residuals(spec, result.solution);
    result.norm_x = result.solution.norm_x();
    result.within_ball = result.norm_x <= result.report.radius + options.tol;
    return result;
}

VerifyReport verify(const ProblemSpec& spec, const SolutionProfile& sol, double tol) {
    VerifyReport rep;
    try {
        const std::vector<double>& grid = sol.grid();
        if (grid.size() < 2) throw PreconditionError("verify: grid too small");

        // Midpoint refinement: the piecewise-linear iterate is unchanged, so
        // a fresh operator application on the finer grid re-does every
        // quadrature with more structure and no interpolation drift.
        SolutionProfile fine;
        fine.dx0 = sol.dx0;
        fine.x0 = sol.x0;
        fine.x.grid.reserve(2 * grid.size() - 1);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            fine.x.grid.push_back(grid[i]);
            fine.x.grid.push_back(0.5 * (grid[i] + grid[i + 1]));
        }
        fine.x.grid.push_back(grid.back());
        fine.dx.grid = fine.x.grid;
        auto refine_values = [&](const GridProfile& src, GridProfile& dst) {
            dst.values.resize(dst.grid.size());
            for (std::size_t i = 0; i + 1 < src.values.size(); ++i) {
                dst.values[2 * i] = src.at(i);
                dst.values[2 * i + 1] = 0.5 * (src.right_of(i) + src.left_of(i + 1));
            }
            dst.values.back() = src.values.back();
            dst.jumps = src.jumps;
        };
        refine_values(sol.x, fine.x);
        refine_values(sol.dx, fine.dx);

        const SolutionProfile tsol = apply_T(spec, fine, std::min(1e-10, 0.01 * tol));

        auto gap_on_nodes = [&](const GridProfile& a, const GridProfile& b) {
            double d = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                d = std::max(d, std::abs(a.at(i) - b.at(2 * i)));
            }
            for (const Breakpoint& j : a.jumps) {
                const Breakpoint* o = b.jump_at(j.t);
                const double bl = o ? o->left : b.value_at(j.t);
                const double br = o ? o->right : b.value_at(j.t);
                d = std::max({d, std::abs(j.left - bl), std::abs(j.right - br)});
            }
            return d;
        };
        rep.residual = gap_on_nodes(sol.x, tsol.x);
        rep.bc_residuals = boundary_residuals(spec, sol);

        std::vector<double> expected = u_jump_locations(spec.u);
        std::vector<double> actual;
        for (const Breakpoint& j : sol.dx.jumps) actual.push_back(j.t);
        std::sort(actual.begin(), actual.end());
        rep.jumps_match = expected == actual;

        rep.ok = rep.residual <= tol && rep.bc_residuals[0] <= tol &&
                 rep.bc_residuals[1] <= tol && rep.jumps_match;
    } catch (const std::exception& e) {
        rep.error = e.what();
        rep.ok = false;
    }
    return rep;
}

}  // namespace dbvp
