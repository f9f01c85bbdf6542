#include "dbvp/integrate.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <queue>
#include <vector>

namespace dbvp {

std::string method_name(IntegralResult::Method m) {
    switch (m) {
        case IntegralResult::Method::antiderivative: return "antiderivative";
        case IntegralResult::Method::adaptive: return "adaptive";
        case IntegralResult::Method::improper_limit: return "improper-limit";
        case IntegralResult::Method::jump_sum_continuous: return "jump-sum+continuous-part";
    }
    return "unknown";
}

Integrand Integrand::without_antiderivative() const {
    Integrand g = *this;
    g.antiderivative = nullptr;
    return g;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1,1]
constexpr double kron_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kron_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEval {
    double value = 0.0;
    double error = 0.0;
};

PanelEval gk15(const std::function<double(double)>& fn, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    fv[7] = fn(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kron_nodes[j];
        fv[j] = fn(center - dx);
        fv[14 - j] = fn(center + dx);
    }

    double resk = kron_weights[7] * fv[7];
    double resabs = kron_weights[7] * std::abs(fv[7]);
    for (int j = 0; j < 7; ++j) {
        resk += kron_weights[j] * (fv[j] + fv[14 - j]);
        resabs += kron_weights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    }
    double resg = gauss_weights[3] * fv[7];
    for (int j = 0; j < 3; ++j) {
        resg += gauss_weights[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
    }

    const double reskh = resk * 0.5;
    double resasc = kron_weights[7] * std::abs(fv[7] - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += kron_weights[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
    }

    PanelEval out;
    out.value = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > DBL_MIN / (50.0 * DBL_EPSILON)) {
        err = std::max(50.0 * DBL_EPSILON * resabs, err);
    }
    out.error = err;
    return out;
}

struct Panel {
    double a, b, value, error;
    int depth;
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

struct AdaptiveOutcome {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool converged = false;
};

// Globally adaptive bisection: always split the panel with the largest error.
AdaptiveOutcome adaptive_gk(const std::function<double(double)>& fn, double a, double b,
                            double tol, long max_evals, const std::vector<double>& forced_splits) {
    constexpr int max_depth = 60;
    AdaptiveOutcome out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::vector<double> edges{a};
    for (double s : forced_splits) {
        if (s > a && s < b) edges.push_back(s);
    }
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> active;
    std::vector<Panel> settled;  // too deep or too narrow to split further
    double total_error = 0.0;

    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        PanelEval e = gk15(fn, edges[i], edges[i + 1]);
        out.evals += 15;
        active.push({edges[i], edges[i + 1], e.value, e.error, 0});
        total_error += e.error;
    }

    const double min_width = 8.0 * DBL_EPSILON * std::max({std::abs(a), std::abs(b), 1.0});
    while (total_error > tol && !active.empty() && out.evals + 30 <= max_evals) {
        Panel worst = active.top();
        if (worst.error <= 0.0) break;
        active.pop();
        if (worst.depth >= max_depth || (worst.b - worst.a) <= min_width) {
            settled.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        PanelEval le = gk15(fn, worst.a, mid);
        PanelEval re = gk15(fn, mid, worst.b);
        out.evals += 30;
        total_error += le.error + re.error - worst.error;
        active.push({worst.a, mid, le.value, le.error, worst.depth + 1});
        active.push({mid, worst.b, re.value, re.error, worst.depth + 1});
    }

    std::vector<Panel> all = std::move(settled);
    all.reserve(all.size() + active.size());
    while (!active.empty()) {
        all.push_back(active.top());
        active.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double v = 0.0, e = 0.0;
    for (const Panel& p : all) {
        v += p.value;
        e += p.error;
    }
    out.value = v;
    out.error = e;
    out.converged = e <= tol;
    return out;
}

// lim_{eps->0+} of I(eps) = integral over [a+eps, b], sampled on a geometric
// eps-sequence with slices integrated incrementally. Each step extrapolates
// from the last three partial values: a two-term Richardson step when the
// measured decay ratio is near the geometric factor 2, Aitken's delta-squared
// otherwise. Stops when two successive extrapolants agree within tol; the
// reported estimate adds the accumulated slice-quadrature noise on top of
// that difference.
IntegralResult improper_limit(const Integrand& f, double a, double b, double tol,
                              long max_evals) {
    const double eps0 = std::min(0.1, 0.25 * (b - a));
    long evals_left = max_evals;

    std::vector<double> partials;
    double noise = 0.0;

    AdaptiveOutcome base =
        adaptive_gk(f.fn, a + eps0, b, std::max(tol * 0.25, 1e-13), evals_left, f.breakpoints);
    evals_left -= base.evals;
    noise += base.error;
    partials.push_back(base.value);

    bool have_prev = false;
    double prev_extrap = 0.0;
    double eps_prev = eps0;

    for (int k = 1; k <= 40 && evals_left > 0; ++k) {
        const double eps_k = std::ldexp(eps0, -k);
        const double slice_tol = std::max(std::ldexp(tol, -k - 2), 1e-14);
        AdaptiveOutcome piece =
            adaptive_gk(f.fn, a + eps_k, a + eps_prev, slice_tol, evals_left, f.breakpoints);
        evals_left -= piece.evals;
        noise += piece.error;
        partials.push_back(partials.back() + piece.value);
        eps_prev = eps_k;

        const std::size_t n = partials.size();
        if (n < 3) continue;
        const double i0 = partials[n - 3], i1 = partials[n - 2], i2 = partials[n - 1];
        const double d1 = i1 - i0, d2 = i2 - i1;

        double extrap;
        if (std::abs(d2) <= 0.05 * tol) {
            extrap = i2;
        } else {
            const double r2 = 2.0 * i2 - i1;
            const double denom = d2 - d1;
            const double aitken = (denom != 0.0) ? i2 - d2 * d2 / denom : i2;
            const double rho = d1 / d2;
            extrap = (rho >= 1.7 && rho <= 2.35) ? r2 : aitken;
        }

        const double diff = have_prev ? std::abs(extrap - prev_extrap) : std::abs(d2);
        if (have_prev && diff <= tol) {
            return {extrap, diff + noise, IntegralResult::Method::improper_limit};
        }
        prev_extrap = extrap;
        have_prev = true;
    }
    throw IntegrationError(
        "improper-limit extrapolation did not stabilize within tol=" + fmt_double(tol));
}

}  // namespace

IntegralResult hk_integrate(const Integrand& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("hk_integrate: tol must be positive");
    if (!(a >= 0.0 && a <= b && b <= 1.0)) {
        throw PreconditionError("hk_integrate: need 0 <= a <= b <= 1");
    }
    if (!f.fn && !f.antiderivative) throw PreconditionError("hk_integrate: empty integrand");

    if (f.antiderivative) {
        const double fa = f.antiderivative(a);
        const double fb = f.antiderivative(b);
        return {fb - fa, 2.0 * DBL_EPSILON * (std::abs(fa) + std::abs(fb)),
                IntegralResult::Method::antiderivative};
    }
    if (a == b) return {0.0, 0.0, IntegralResult::Method::adaptive};

    constexpr long max_evals = 50'000'000;
    if (f.singular_point) {
        const double s = *f.singular_point;
        if (s == a) return improper_limit(f, a, b, tol, max_evals);
        if (s > a && s < b) {
            throw PreconditionError(
                "hk_integrate: singular point interior to the range; split the integral at it");
        }
        if (s == b) {
            throw PreconditionError("hk_integrate: singular point at the upper limit is not supported");
        }
    }

    AdaptiveOutcome r = adaptive_gk(f.fn, a, b, tol, max_evals, f.breakpoints);
    if (!r.converged) {
        throw IntegrationError("adaptive quadrature stalled at error estimate " +
                               fmt_double(r.error) + " (tol=" + fmt_double(tol) + ")");
    }
    return {r.value, r.error, IntegralResult::Method::adaptive};
}

IntegralResult hk_integrate(const Integrand& f, double a, double b) {
    const bool improper =
        !f.antiderivative && f.singular_point && *f.singular_point == a && a < b;
    return hk_integrate(f, a, b, improper ? 1e-5 : 1e-9);
}

TaggedPartition TaggedPartition::uniform(double a, double b, int segments,
                                         const std::vector<double>& forced_tags) {
    if (!(b > a) || segments < 1) throw PreconditionError("TaggedPartition: empty range");

    std::vector<double> forced;
    for (double t : forced_tags) {
        if (t > a && t < b) forced.push_back(t);
    }
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());

    std::vector<double> pts;
    pts.push_back(a);
    for (int i = 1; i < segments; ++i) {
        const double p = a + (b - a) * i / segments;
        if (!std::binary_search(forced.begin(), forced.end(), p)) pts.push_back(p);
    }
    pts.push_back(b);
    // keep consecutive forced tags in distinct subintervals
    for (std::size_t i = 0; i + 1 < forced.size(); ++i) {
        auto it = std::upper_bound(pts.begin(), pts.end(), forced[i]);
        if (it != pts.end() && *it >= forced[i + 1]) {
            pts.insert(it, 0.5 * (forced[i] + forced[i + 1]));
        }
    }

    TaggedPartition tp;
    tp.points = std::move(pts);
    tp.tags.reserve(tp.points.size() - 1);
    std::size_t fi = 0;
    for (std::size_t i = 0; i + 1 < tp.points.size(); ++i) {
        const double lo = tp.points[i], hi = tp.points[i + 1];
        if (fi < forced.size() && forced[fi] > lo && forced[fi] < hi) {
            tp.tags.push_back(forced[fi]);
            ++fi;
        } else {
            tp.tags.push_back(0.5 * (lo + hi));
        }
    }
    return tp;
}

TaggedPartition TaggedPartition::with_points(double a, double b, int segments,
                                             const std::vector<double>& extra_points) {
    if (!(b > a) || segments < 1) throw PreconditionError("TaggedPartition: empty range");
    std::vector<double> pts;
    pts.push_back(a);
    for (int i = 1; i < segments; ++i) pts.push_back(a + (b - a) * i / segments);
    for (double t : extra_points) {
        if (t > a && t < b) pts.push_back(t);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    TaggedPartition tp;
    tp.points = std::move(pts);
    tp.tags.reserve(tp.points.size() - 1);
    for (std::size_t i = 0; i + 1 < tp.points.size(); ++i) {
        tp.tags.push_back(0.5 * (tp.points[i] + tp.points[i + 1]));
    }
    return tp;
}

bool TaggedPartition::has_tag(double t) const {
    return std::find(tags.begin(), tags.end(), t) != tags.end();
}

double stieltjes_sum(const TaggedPartition& p, const std::function<double(double)>& g,
                     const std::function<double(double)>& u) {
    double s = 0.0;
    double u_prev = u(p.points.front());
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
        const double u_next = u(p.points[i + 1]);
        s += g(p.tags[i]) * (u_next - u_prev);
        u_prev = u_next;
    }
    return s;
}

IntegralResult hks_integrate(const RegulatedFn& g, const RegulatedFn& u, double a, double b,
                             double tol) {
    if (!(tol > 0.0)) throw PreconditionError("hks_integrate: tol must be positive");
    if (!(a >= 0.0 && a <= b && b <= 1.0)) {
        throw PreconditionError("hks_integrate: need 0 <= a <= b <= 1");
    }

    const TotalVariation tv = g.total_variation(10, 300'000);
    if (tv.unbounded_suspected) {
        throw PreconditionError(
            "hks_integrate: integrand variation did not stabilize; bounded variation required");
    }

    IntegralResult out;
    out.method = IntegralResult::Method::jump_sum_continuous;
    if (a == b) return out;

    struct JumpEvent {
        double t, delta;
    };
    std::vector<JumpEvent> events;
    const double delta_a = u.right_limit(a) - u.eval(a);
    if (delta_a != 0.0) events.push_back({a, delta_a});
    for (const Breakpoint& bp : u.breakpoints()) {
        if (bp.t > a && bp.t < b) {
            const double d = bp.right - bp.left;
            if (d != 0.0) events.push_back({bp.t, d});
        }
    }
    const double delta_b = u.eval(b) - u.left_limit(b);
    if (delta_b != 0.0) events.push_back({b, delta_b});

    double jump_sum = 0.0;
    for (const JumpEvent& ev : events) jump_sum += g.eval(ev.t) * ev.delta;

    if (u.kind() == RegulatedFn::Kind::step) {
        out.value = jump_sum;  // continuous part identically zero: exact
        out.error_estimate = 0.0;
        return out;
    }

    // continuous part: u with its jumps removed
    std::vector<double> event_ts;
    std::vector<double> prefix{0.0};
    for (const JumpEvent& ev : events) {
        event_ts.push_back(ev.t);
        prefix.push_back(prefix.back() + ev.delta);
    }
    auto u_cont = [&](double t) {
        const std::size_t before =
            std::lower_bound(event_ts.begin(), event_ts.end(), t) - event_ts.begin();
        double removed = prefix[before];
        if (before < event_ts.size() && event_ts[before] == t && t > a) {
            removed += u.eval(t) - u.left_limit(t);
        }
        return u.eval(t) - removed;
    };
    auto g_eval = [&](double t) { return g.eval(t); };

    std::vector<double> forced;
    for (const Breakpoint& bp : u.breakpoints()) {
        if (bp.t > a && bp.t < b) forced.push_back(bp.t);
    }
    for (const Breakpoint& bp : g.breakpoints()) {
        if (bp.t > a && bp.t < b) forced.push_back(bp.t);
    }

    constexpr int n_max = 1 << 20;
    int n = 8;
    double prev = stieltjes_sum(TaggedPartition::with_points(a, b, n, forced), g_eval, u_cont);
    double cur = prev;
    double est = -1.0;
    while (n < n_max) {
        n *= 2;
        cur = stieltjes_sum(TaggedPartition::with_points(a, b, n, forced), g_eval, u_cont);
        est = std::abs(cur - prev);
        if (est <= std::max(0.5 * tol, 1e-15)) break;
        prev = cur;
    }
    out.value = jump_sum + cur;
    out.error_estimate = std::max(est, 0.0);
    return out;
}

IntegralResult iterated_integrate(const GridProfile& F, double a, double t, double tol) {
    (void)tol;  // trapezoid of grid data; the error estimate is structural
    if (F.grid.size() < 2) throw PreconditionError("iterated_integrate: profile needs two nodes");
    if (!(a >= F.grid.front() && a <= t && t <= F.grid.back())) {
        throw PreconditionError("iterated_integrate: range outside the profile");
    }
    IntegralResult out;
    out.method = IntegralResult::Method::adaptive;
    if (a == t) return out;

    const auto lo_it = std::upper_bound(F.grid.begin(), F.grid.end(), a);
    const auto hi_it = std::lower_bound(F.grid.begin(), F.grid.end(), t);
    const std::size_t lo = lo_it - F.grid.begin();
    const std::size_t hi = hi_it - F.grid.begin();  // grid[lo..hi) lies in (a,t)

    auto right_value = [&](double x) {
        auto it = std::lower_bound(F.grid.begin(), F.grid.end(), x);
        if (it != F.grid.end() && *it == x) return F.right_of(it - F.grid.begin());
        return F.value_at(x);
    };
    auto left_value = [&](double x) {
        auto it = std::lower_bound(F.grid.begin(), F.grid.end(), x);
        if (it != F.grid.end() && *it == x) return F.left_of(it - F.grid.begin());
        return F.value_at(x);
    };

    auto trapz = [&](int stride) {
        double s = 0.0;
        double pt = a;
        double pv = right_value(a);
        auto advance = [&](double nt) {
            s += 0.5 * (pv + left_value(nt)) * (nt - pt);
            pt = nt;
            pv = right_value(nt);
        };
        std::size_t emitted = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            const bool keep = stride == 1 || (emitted % 2 == 0) || F.jump_at(F.grid[i]) != nullptr;
            ++emitted;
            if (keep) advance(F.grid[i]);
        }
        advance(t);
        return s;
    };

    const double full = trapz(1);
    const double half = trapz(2);
    out.value = full;
    out.error_estimate = std::abs(full - half) / 3.0;
    return out;
}

}  // namespace dbvp
