#include "dbvp/operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbvp {

namespace {

// One jump of the integrator u, split by the value taken at the point:
// full = u(t+) - u(t-), left_half = u(t) - u(t-), right_half = u(t+) - u(t).
// At t = 0 the limit from below reads as u(0), at t = 1 the limit from above
// reads as u(1) (endpoint convention of hks_integrate).
struct UJump {
    double t = 0.0;
    double full = 0.0;
    double left_half = 0.0;
    double right_half = 0.0;
};

std::vector<UJump> u_jump_events(const RegulatedFn& u) {
    std::vector<UJump> events;
    const double d0 = u.right_limit_at_0() - u.value_at_0();
    if (d0 != 0.0) events.push_back({0.0, d0, 0.0, d0});
    for (const Breakpoint& b : u.breakpoints()) {
        const double full = b.right - b.left;
        if (full == 0.0 && b.at == b.left) continue;
        events.push_back({b.t, full, b.at - b.left, b.right - b.at});
    }
    const double d1 = u.value_at_1() - u.left_limit_at_1();
    if (d1 != 0.0) events.push_back({1.0, d1, d1, 0.0});
    return events;
}

std::size_t node_index(const std::vector<double>& grid, double t, const char* what) {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end() || *it != t) {
        throw std::logic_error(std::string(what) + ": point is not a grid node");
    }
    return static_cast<std::size_t>(it - grid.begin());
}

// f(s, x(s)) restricted to one grid segment, with x piecewise linear from
// the right value at the left node to the left value at the right node.
class SegmentEval {
public:
    SegmentEval(const Integrand2& f, const GridProfile& x, std::size_t i)
        : f_(f),
          a_(x.grid[i]),
          x_left_(x.right_of(i)),
          slope_((x.left_of(i + 1) - x.right_of(i)) / (x.grid[i + 1] - x.grid[i])) {}

    double operator()(double s) const { return f_.fn(s, x_left_ + slope_ * (s - a_)); }

private:
    const Integrand2& f_;
    double a_, x_left_, slope_;
};

// Integral of f(s, x(s)) over one grid segment via the adaptive path.
double segment_integral(const Integrand2& f, const GridProfile& x, std::size_t i, double tol) {
    Integrand seg;
    seg.fn = SegmentEval(f, x, i);
    if (!f.depends_on_x && f.time_part && f.time_part->singular_point &&
        *f.time_part->singular_point == x.grid[i]) {
        seg.singular_point = x.grid[i];
    }
    return hk_integrate(seg, x.grid[i], x.grid[i + 1], tol).value;
}

// Value of g(s, x(s)) with x read at-point on nodes, interpolated elsewhere.
double g_along(const Integrand2& g, const GridProfile& x, double s) {
    auto it = std::lower_bound(x.grid.begin(), x.grid.end(), s);
    double xv;
    if (it != x.grid.end() && *it == s) {
        xv = x.at(static_cast<std::size_t>(it - x.grid.begin()));
    } else {
        xv = x.value_at(s);
    }
    return g.fn(s, xv);
}

// Regulated view of s -> g(s, x(s)) for variation checks and Stieltjes calls.
RegulatedFn g_regulated_along(const Integrand2& g, const GridProfile& x) {
    if (!g.depends_on_x && g.time_regulated) return *g.time_regulated;
    return RegulatedFn::closed_form([&g, &x](double s) { return g_along(g, x, s); });
}

// Everything profile_G and apply_T share: jump bookkeeping against u and the
// Riemann-Stieltjes prefix against the continuous part of u.
struct GParts {
    std::vector<UJump> events;
    std::vector<double> g_at_jump;     // g(tau, x(tau)) per event
    std::vector<double> jump_before;   // per node: sum of full jumps at tau < t_i
    std::vector<double> cont_prefix;   // per node: int_0^{t_i} g d(continuous part)
};

GParts build_g_parts(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const std::vector<double>& grid = x.grid();
    const std::size_t n = grid.size();

    const RegulatedFn greg = g_regulated_along(spec.g, x.x);
    const TotalVariation tv = greg.total_variation();
    if (tv.unbounded_suspected) {
        throw PreconditionError(
            "profile_G: variation of g along the iterate does not stabilize");
    }

    GParts parts;
    parts.events = u_jump_events(spec.u);
    parts.g_at_jump.reserve(parts.events.size());
    for (const UJump& e : parts.events) {
        parts.g_at_jump.push_back(g_along(spec.g, x.x, e.t));
    }

    parts.jump_before.assign(n, 0.0);
    {
        double acc = 0.0;
        std::size_t e = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (e < parts.events.size() && parts.events[e].t < grid[i]) {
                acc += parts.g_at_jump[e] * parts.events[e].full;
                ++e;
            }
            parts.jump_before[i] = acc;
        }
    }

    parts.cont_prefix.assign(n, 0.0);
    if (spec.u.kind() == RegulatedFn::Kind::step) return parts;  // continuous part constant

    // u's own jump prefix, so that c(s) = u(s) - J(s) is continuous.
    const auto& ev = parts.events;
    auto c_of = [&](double s) {
        double j = 0.0;
        for (const UJump& e : ev) {
            if (e.t < s) {
                j += e.full;
            } else if (e.t == s) {
                j += e.left_half;
            } else {
                break;
            }
        }
        return spec.u.eval(s) - j;
    };

    // Midpoint Riemann-Stieltjes prefix with per-segment refinement doubling.
    // Stabilizes immediately when g is constant along each segment (the sum
    // telescopes); for rough u with non-constant g the final increment is a
    // heuristic error indicator, per the restriction on that pairing.
    std::vector<double> prev;
    const double stop = std::max(0.25 * tol, 1e-15);
    for (int m = 1; m <= 64; m *= 2) {
        std::vector<double> cur(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = grid[i], b = grid[i + 1];
            const double w = (b - a) / m;
            double seg = 0.0;
            double c_left = c_of(a);
            for (int j = 0; j < m; ++j) {
                const double right = (j == m - 1) ? b : a + (j + 1) * w;
                const double c_right = c_of(right);
                seg += g_along(spec.g, x.x, a + (j + 0.5) * w) * (c_right - c_left);
                c_left = c_right;
            }
            cur[i + 1] = cur[i] + seg;
        }
        if (!prev.empty()) {
            double delta = 0.0;
            for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(cur[i] - prev[i]));
            if (delta <= stop) {
                parts.cont_prefix = std::move(cur);
                return parts;
            }
        }
        prev = std::move(cur);
    }
    parts.cont_prefix = std::move(prev);
    return parts;
}

// G values and one-sided data on the grid from assembled parts.
struct GProfileData {
    std::vector<double> values;
    std::vector<Breakpoint> jumps;
};

GProfileData assemble_G(const GParts& parts, const std::vector<double>& grid) {
    const std::size_t n = grid.size();
    GProfileData out;
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = parts.jump_before[i] + parts.cont_prefix[i];
    }
    for (std::size_t e = 0; e < parts.events.size(); ++e) {
        const UJump& ev = parts.events[e];
        const double gv = parts.g_at_jump[e];
        const std::size_t i = node_index(grid, ev.t, "profile_G");
        const double left = out.values[i];
        out.values[i] = left + gv * ev.left_half;
        out.jumps.push_back({ev.t, left, left + gv * ev.full, out.values[i]});
    }
    return out;
}

// Dedicated integrations of f(s, x(s)) from 0 to eta and to 1 in one sweep.
struct EndpointF {
    double at_eta = 0.0;
    double at_one = 0.0;
};

EndpointF dedicated_F(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const std::vector<double>& grid = x.grid();
    EndpointF out;
    if (!spec.f.depends_on_x && spec.f.time_part && spec.f.time_part->antiderivative) {
        const auto& A = spec.f.time_part->antiderivative;
        out.at_eta = A(spec.eta) - A(0.0);
        out.at_one = A(1.0) - A(0.0);
        return out;
    }
    const std::size_t eta_node = node_index(grid, spec.eta, "apply_T");
    const double seg_tol = std::max(0.5 * tol / static_cast<double>(grid.size()), 1e-12);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        acc += segment_integral(spec.f, x.x, i, seg_tol);
        if (i + 1 == eta_node) out.at_eta = acc;
    }
    if (eta_node == 0) out.at_eta = 0.0;
    out.at_one = acc;
    return out;
}

// Cumulative integral of F(s,x) over [0, t_i] for every node, exact in the
// profile sense: each segment contributes F(t_i) w + int (t_{i+1}-s) f ds,
// the Fubini form of the inner double integral.
std::vector<double> cumulative_F_integral(const ProblemSpec& spec, const SolutionProfile& x,
                                          const GridProfile& F, double tol) {
    const std::vector<double>& grid = x.grid();
    const std::size_t n = grid.size();
    std::vector<double> ii(n, 0.0);
    // Floor keeps densely oscillating primitives from stalling the panel
    // estimator; smooth segments converge far below it regardless.
    const double seg_tol = std::max(tol / static_cast<double>(n), 1e-11);

    const bool exact_f = !spec.f.depends_on_x && spec.f.time_part &&
                         static_cast<bool>(spec.f.time_part->antiderivative);
    if (exact_f) {
        const auto A = spec.f.time_part->antiderivative;
        const double A0 = A(0.0);
        const double a_tol = std::max(seg_tol, 1e-10);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            Integrand seg;
            seg.fn = [&A, A0](double s) { return A(s) - A0; };
            ii[i + 1] = ii[i] + hk_integrate(seg, grid[i], grid[i + 1], a_tol).value;
        }
        return ii;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double b = grid[i + 1];
        const SegmentEval fx(spec.f, x.x, i);
        Integrand seg;
        seg.fn = [&fx, b](double s) { return (b - s) * fx(s); };
        const double inner = hk_integrate(seg, grid[i], b, seg_tol).value;
        ii[i + 1] = ii[i] + F.at(i) * (b - grid[i]) + inner;
    }
    return ii;
}

// Cumulative integral of G_u(s,x) over [0, t_i]. The jump part integrates
// exactly (piecewise linear in t). The continuous part uses the closed form
//   int_a^b (t-s) dc = (t-b)c(b) - (t-a)c(a) + Uc(b) - Uc(a)
// when g is piecewise constant in t and u carries a primitive; otherwise it
// falls back to the trapezoid of the sampled prefix.
std::vector<double> cumulative_G_integral(const ProblemSpec& spec, const SolutionProfile& x,
                                          const GParts& parts) {
    const std::vector<double>& grid = x.grid();
    const std::size_t n = grid.size();
    std::vector<double> ii(n, 0.0);

    {
        double acc = 0.0;
        std::size_t e = 0;
        double level = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            while (e < parts.events.size() && parts.events[e].t <= grid[i]) {
                level += parts.g_at_jump[e] * parts.events[e].full;
                ++e;
            }
            acc += level * (grid[i + 1] - grid[i]);
            ii[i + 1] = acc;
        }
    }

    if (spec.u.kind() == RegulatedFn::Kind::step) return ii;

    const bool g_piecewise_const = !spec.g.depends_on_x && spec.g.time_regulated &&
                                   spec.g.time_regulated->kind() == RegulatedFn::Kind::step;
    if (g_piecewise_const && spec.u.antiderivative()) {
        const RegulatedFn& gt = *spec.g.time_regulated;
        std::vector<double> pb = {0.0};
        std::vector<double> pv;
        for (const Breakpoint& b : gt.breakpoints()) {
            pv.push_back(gt.right_limit(pb.back()));
            pb.push_back(b.t);
        }
        pv.push_back(gt.right_limit(pb.back()));
        pb.push_back(1.0);

        const auto& U = spec.u.antiderivative();
        const auto& ev = parts.events;
        auto c_of = [&](double s) {
            double j = 0.0;
            for (const UJump& e : ev) {
                if (e.t < s) {
                    j += e.full;
                } else if (e.t == s) {
                    j += e.left_half;
                } else {
                    break;
                }
            }
            return spec.u.eval(s) - j;
        };
        auto Uc = [&](double s) {
            double pj = 0.0;
            for (const UJump& e : ev) {
                if (e.t < s) pj += e.full * (s - e.t);
            }
            return U(s) - pj;
        };

        for (std::size_t i = 1; i < n; ++i) {
            const double t = grid[i];
            double sum = 0.0;
            for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
                const double a = pb[j];
                if (a >= t) break;
                const double b = std::min(pb[j + 1], t);
                sum += pv[j] *
                       ((t - b) * c_of(b) - (t - a) * c_of(a) + Uc(b) - Uc(a));
            }
            ii[i] += sum;
        }
        return ii;
    }

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        acc += 0.5 * (parts.cont_prefix[i] + parts.cont_prefix[i + 1]) *
               (grid[i + 1] - grid[i]);
        ii[i + 1] += acc;
    }
    return ii;
}

GridProfile dx_from_parts(const GridProfile& F, const GProfileData& G, double dx0,
                          const std::vector<double>& grid) {
    GridProfile dx;
    dx.grid = grid;
    dx.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dx.values[i] = dx0 - F.at(i) - G.values[i];
    }
    dx.jumps.reserve(G.jumps.size());
    for (const Breakpoint& j : G.jumps) {
        const std::size_t i = node_index(grid, j.t, "reconstruct_Dx");
        const double f_here = F.at(i);
        dx.jumps.push_back(
            {j.t, dx0 - f_here - j.left, dx0 - f_here - j.right, dx.values[i]});
    }
    return dx;
}

}  // namespace

SolutionProfile SolutionProfile::zeros_on(std::vector<double> grid) {
    SolutionProfile p;
    p.x = GridProfile::zeros_on(grid);
    p.dx = GridProfile::zeros_on(std::move(grid));
    return p;
}

std::vector<double> make_grid(const ProblemSpec& spec, int base_points) {
    if (base_points < 2) throw PreconditionError("make_grid: need at least 2 base points");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(base_points) + 8);
    for (int i = 0; i < base_points; ++i) {
        g.push_back(static_cast<double>(i) / (base_points - 1));
    }
    g.back() = 1.0;
    g.push_back(spec.eta);
    for (const Breakpoint& b : spec.u.breakpoints()) g.push_back(b.t);
    if (!spec.f.depends_on_x && spec.f.time_part) {
        for (double t : spec.f.time_part->breakpoints) g.push_back(t);
    }
    if (!spec.g.depends_on_x && spec.g.time_regulated) {
        for (const Breakpoint& b : spec.g.time_regulated->breakpoints()) g.push_back(b.t);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

void validate_spec(const ProblemSpec& spec) {
    if (!std::isfinite(spec.beta)) throw PreconditionError("beta must be finite");
    if (!(spec.eta >= 0.0 && spec.eta <= 1.0)) throw PreconditionError("eta out of [0,1]");
    if (!(spec.bounds.m >= 0.0)) throw PreconditionError("M must be nonnegative");
    if (!spec.f.fn) throw PreconditionError("f is empty");
    if (!spec.g.fn) throw PreconditionError("g is empty");
    static constexpr double probe[] = {-100.0, -10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0, 100.0};
    for (double v : probe) {
        const double gv = spec.g.fn(0.0, v);
        if (!(std::abs(gv) <= 1e-12 * (1.0 + std::abs(v)))) {
            throw PreconditionError("g(0,x) != 0 at x = " + std::to_string(v));
        }
    }
}

GridProfile profile_F(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const std::vector<double>& grid = x.grid();
    const std::size_t n = grid.size();
    if (n < 2) throw PreconditionError("profile_F: grid too small");

    GridProfile F;
    F.grid = grid;
    F.values.assign(n, 0.0);

    if (!spec.f.depends_on_x && spec.f.time_part && spec.f.time_part->antiderivative) {
        const auto& A = spec.f.time_part->antiderivative;
        const double A0 = A(grid.front());
        for (std::size_t i = 1; i < n; ++i) F.values[i] = A(grid[i]) - A0;
        return F;
    }

    const double seg_tol = std::max(tol / static_cast<double>(n), 1e-12);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        F.values[i + 1] = F.values[i] + segment_integral(spec.f, x.x, i, seg_tol);
    }
    return F;
}

GridProfile profile_G(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const std::vector<double>& grid = x.grid();
    if (grid.size() < 2) throw PreconditionError("profile_G: grid too small");
    const GParts parts = build_g_parts(spec, x, tol);
    GProfileData data = assemble_G(parts, grid);
    GridProfile G;
    G.grid = grid;
    G.values = std::move(data.values);
    G.jumps = std::move(data.jumps);
    return G;
}

SolutionProfile apply_T(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const std::vector<double>& grid = x.grid();
    const std::size_t n = grid.size();
    if (n < 2) throw PreconditionError("apply_T: grid too small");

    const GridProfile F = profile_F(spec, x, tol);
    const GParts parts = build_g_parts(spec, x, tol);
    const GProfileData G = assemble_G(parts, grid);

    const EndpointF fe = dedicated_F(spec, x, 0.25 * tol);
    const RegulatedFn greg = g_regulated_along(spec.g, x.x);
    const double g_one = hks_integrate(greg, spec.u, 0.0, 1.0, 0.25 * tol).value;
    const double g_eta = hks_integrate(greg, spec.u, 0.0, spec.eta, 0.25 * tol).value;

    const double dx0 = 0.5 * (fe.at_one + fe.at_eta + g_one + g_eta);
    const double x0 = spec.beta * dx0;

    const std::vector<double> ii_f = cumulative_F_integral(spec, x, F, tol);
    const std::vector<double> ii_g = cumulative_G_integral(spec, x, parts);

    SolutionProfile out;
    out.dx0 = dx0;
    out.x0 = x0;
    out.x.grid = grid;
    out.x.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.x.values[i] = (grid[i] + spec.beta) * dx0 - ii_f[i] - ii_g[i];
    }
    for (const Breakpoint& b : spec.u.breakpoints()) {
        const double v = out.x.values[node_index(grid, b.t, "apply_T")];
        out.x.jumps.push_back({b.t, v, v, v});  // kink marker: Tx stays continuous
    }
    out.dx = dx_from_parts(F, G, dx0, grid);
    return out;
}

GridProfile reconstruct_Dx(const ProblemSpec& spec, const SolutionProfile& x, double tol) {
    const GridProfile F = profile_F(spec, x, tol);
    const GParts parts = build_g_parts(spec, x, tol);
    const GProfileData G = assemble_G(parts, x.grid());
    return dx_from_parts(F, G, x.dx0, x.grid());
}

}  // namespace dbvp
