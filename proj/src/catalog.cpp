#include "dbvp/catalog.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace dbvp {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& tok, const std::string& context) {
    const std::string t = trim(tok);
    if (t.empty()) throw CatalogError(context + ": missing numeric argument");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw CatalogError(context + ": bad number '" + t + "'");
    }
    return v;
}

std::vector<double> parse_numbers(const std::string& group, const std::string& context) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= group.size()) {
        const std::size_t comma = group.find(',', pos);
        const std::string tok = group.substr(pos, comma == std::string::npos ? std::string::npos
                                                                             : comma - pos);
        out.push_back(parse_number(tok, context));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

struct ParsedName {
    std::string head;
    std::string args;  // inside the parentheses, empty when none
    bool has_args = false;
};

ParsedName parse_name(const std::string& name) {
    const std::string s = trim(name);
    if (s.empty()) throw CatalogError("empty catalog name");
    const std::size_t open = s.find('(');
    if (open == std::string::npos) return {s, "", false};
    if (s.back() != ')') throw CatalogError("unbalanced parentheses in '" + s + "'");
    return {trim(s.substr(0, open)), s.substr(open + 1, s.size() - open - 2), true};
}

double weierstrass_tolerance(const ParsedName& p) {
    if (!p.has_args || trim(p.args).empty()) return 1e-12;
    const double tol = parse_number(p.args, "weierstrass");
    if (!(tol > 0.0)) throw CatalogError("weierstrass: tolerance must be positive");
    return tol;
}

struct StepData {
    std::vector<double> points;
    std::vector<double> values;
};

StepData parse_step(const ParsedName& p) {
    if (!p.has_args) throw CatalogError("step: expected step(p1,..;v0,v1,..)");
    const std::size_t semi = p.args.find(';');
    if (semi == std::string::npos) {
        throw CatalogError("step: expected ';' between breakpoints and values");
    }
    StepData d;
    d.points = parse_numbers(p.args.substr(0, semi), "step points");
    d.values = parse_numbers(p.args.substr(semi + 1), "step values");
    if (d.values.size() != d.points.size() + 1) {
        throw CatalogError("step: need one more value than breakpoints");
    }
    return d;
}

double k41_fn(double t) { return 1.0 / (3.0 * std::sqrt(5.0 + t)); }
double k41_antiderivative(double t) { return (2.0 / 3.0) * (std::sqrt(5.0 + t) - std::sqrt(5.0)); }

double h42_fn(double t) {
    if (t == 0.0) return 0.0;  // measure-zero placeholder; the point is singular
    const double inv = 1.0 / t;
    double s, c;
#if defined(__GNUC__)
    __builtin_sincos(inv * inv, &s, &c);
#else
    s = std::sin(inv * inv);
    c = std::cos(inv * inv);
#endif
    return 1.0 + 2.0 * t * s - 2.0 * inv * c;
}
double h42_antiderivative(double t) {
    if (t == 0.0) return 0.0;
    return t + t * t * std::sin(1.0 / (t * t));
}

double gstar_fn(double t) { return t == 0.0 ? 0.0 : 1.0; }

Integrand step_integrand(const StepData& d) {
    Integrand f;
    std::vector<double> pts = d.points;
    std::vector<double> vals = d.values;
    f.fn = [pts, vals](double t) {
        std::size_t i = 0;
        while (i < pts.size() && t >= pts[i]) ++i;
        return vals[i];
    };
    // piecewise-linear cumulative area
    std::vector<double> area(pts.size() + 1, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double left = i == 0 ? 0.0 : pts[i - 1];
        area[i + 1] = area[i] + vals[i] * (pts[i] - left);
    }
    f.antiderivative = [pts, vals, area](double t) {
        std::size_t i = 0;
        while (i < pts.size() && t >= pts[i]) ++i;
        const double left = i == 0 ? 0.0 : pts[i - 1];
        return area[i] + vals[i] * (t - left);
    };
    f.breakpoints = pts;
    return f;
}

}  // namespace

RegulatedFn make_regulated(const std::string& name) {
    const ParsedName p = parse_name(name);

    if (p.head == "zero") return RegulatedFn::zero();
    if (p.head == "one") return RegulatedFn::constant(1.0);
    if (p.head == "const") {
        if (!p.has_args) throw CatalogError("const: expected const(c)");
        return RegulatedFn::constant(parse_number(p.args, "const"));
    }
    if (p.head == "heaviside") {
        if (!p.has_args) throw CatalogError("heaviside: expected heaviside(center)");
        const double c = parse_number(p.args, "heaviside");
        if (!(c > 0.0 && c < 1.0)) throw CatalogError("heaviside: center must lie in (0,1)");
        return RegulatedFn::heaviside(c);
    }
    if (p.head == "weierstrass") return RegulatedFn::weierstrass(weierstrass_tolerance(p));
    if (p.head == "step") {
        const StepData d = parse_step(p);
        return RegulatedFn::step(d.points, d.values);
    }
    if (p.head == "expr") {
        if (!p.has_args) throw CatalogError("expr: expected expr(id)");
        return make_regulated(trim(p.args));
    }
    if (p.head == "k41") {
        return RegulatedFn::closed_form(k41_fn, {0.5});  // monotone on both halves
    }
    if (p.head == "h42") {
        return RegulatedFn::closed_form(h42_fn);
    }
    if (p.head == "gstar") {
        return RegulatedFn::constant(1.0).with_value_at_0(0.0, 1.0);
    }
    throw CatalogError("unknown catalog function '" + trim(name) + "'");
}

Integrand make_integrand(const std::string& name) {
    const ParsedName p = parse_name(name);

    if (p.head == "zero") {
        return {[](double) { return 0.0; }, [](double) { return 0.0; }, {}, {}};
    }
    if (p.head == "one") {
        return {[](double) { return 1.0; }, [](double t) { return t; }, {}, {}};
    }
    if (p.head == "const") {
        if (!p.has_args) throw CatalogError("const: expected const(c)");
        const double c = parse_number(p.args, "const");
        return {[c](double) { return c; }, [c](double t) { return c * t; }, {}, {}};
    }
    if (p.head == "heaviside") {
        if (!p.has_args) throw CatalogError("heaviside: expected heaviside(center)");
        const double c = parse_number(p.args, "heaviside");
        if (!(c > 0.0 && c < 1.0)) throw CatalogError("heaviside: center must lie in (0,1)");
        return {[c](double t) { return t < c ? 0.0 : 1.0; },
                [c](double t) { return std::max(0.0, t - c); },
                {},
                {c}};
    }
    if (p.head == "weierstrass") {
        const double tol = weierstrass_tolerance(p);
        const int n_terms = weierstrass_terms(tol);
        Integrand f;
        f.fn = [tol](double t) { return weierstrass_value(t, tol); };
        f.antiderivative = [n_terms](double t) {
            double sum = 0.0;
            double pow7 = 1.0, pow2 = 1.0;
            for (int n = 1; n <= n_terms; ++n) {
                pow7 *= 7.0;
                pow2 *= 0.5;
                sum += pow2 * (1.0 - std::cos(pow7 * std::numbers::pi * t)) /
                       (pow7 * std::numbers::pi);
            }
            return sum;
        };
        return f;
    }
    if (p.head == "step") return step_integrand(parse_step(p));
    if (p.head == "expr") {
        if (!p.has_args) throw CatalogError("expr: expected expr(id)");
        return make_integrand(trim(p.args));
    }
    if (p.head == "k41") {
        return {k41_fn, k41_antiderivative, {}, {}};
    }
    if (p.head == "h42") {
        Integrand f;
        f.fn = h42_fn;
        f.antiderivative = h42_antiderivative;
        f.singular_point = 0.0;
        return f;
    }
    if (p.head == "gstar") {
        return {gstar_fn, [](double t) { return t; }, {}, {}};
    }
    throw CatalogError("unknown catalog function '" + trim(name) + "'");
}

Integrand2 make_integrand2(const std::string& name) {
    const ParsedName p = parse_name(name);
    if (p.head == "f41") {
        Integrand2 f;
        f.fn = [](double t, double x) { return x * std::sin(x) / (3.0 * std::sqrt(5.0 + t)); };
        f.depends_on_x = true;
        f.name = "f41";
        return f;
    }
    Integrand2 f;
    Integrand uni = make_integrand(name);
    auto fn = uni.fn;
    f.fn = [fn](double t, double) { return fn(t); };
    f.depends_on_x = false;
    f.time_part = std::move(uni);
    f.time_regulated = make_regulated(name);
    f.name = trim(name);
    return f;
}

}  // namespace dbvp
