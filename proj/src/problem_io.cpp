#include "dbvp/problem_io.hpp"

#include "dbvp/catalog.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dbvp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
    throw ProblemParseError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& path, int line, const std::string& key,
                  const std::string& value) {
    // plain number or a fraction like -1/6
    const auto slash = value.find('/');
    try {
        std::size_t used = 0;
        if (slash != std::string::npos) {
            const std::string num = trimmed(value.substr(0, slash));
            const std::string den = trimmed(value.substr(slash + 1));
            const double n = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
            const double d = std::stod(den, &used);
            if (used != den.size()) throw std::invalid_argument(den);
            if (d == 0.0) fail(path, line, key + ": division by zero");
            return n / d;
        }
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const ProblemParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line, key + ": not a number: '" + value + "'");
    }
}

int parse_int(const std::string& path, int line, const std::string& key,
              const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(path, line, key + ": not an integer: '" + value + "'");
    }
}

struct RawEntry {
    std::string value;
    int line = 0;
};

ordered_json json_real(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;  // JSON has no inf/nan
}

ordered_json problem_echo(const ProblemDocument& doc) {
    ordered_json p;
    p["f"] = doc.f_name;
    p["g"] = doc.g_name;
    p["u"] = doc.u_name;
    p["beta"] = json_real(doc.spec.beta);
    p["eta"] = json_real(doc.spec.eta);
    p["bounds"] = {{"k", doc.k_name}, {"h", doc.h_name}, {"M", json_real(doc.spec.bounds.m)}};
    p["options"] = {{"tol", json_real(doc.options.tol)},
                    {"grid", doc.options.grid},
                    {"max_iter", doc.options.max_iter},
                    {"damping", json_real(doc.options.damping)}};
    return p;
}

ordered_json hypotheses_echo(const HypothesisReport& rep) {
    ordered_json h;
    h["norm_K"] = json_real(rep.norm_K);
    h["norm_H"] = json_real(rep.norm_H);
    h["norm_u"] = json_real(rep.norm_u);
    h["M"] = json_real(rep.m);
    h["smallness"] = json_real(rep.smallness);
    h["condition_ok"] = rep.condition_ok;
    h["radius"] = json_real(rep.radius);
    if (rep.radius_bracket) {
        h["radius_bracket"] = {json_real(rep.radius_bracket->first),
                               json_real(rep.radius_bracket->second)};
    } else {
        h["radius_bracket"] = nullptr;
    }
    return h;
}

void append_row(std::string& out, double t, double xa, double xl, double xr, double da,
                double dl, double dr) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, xa, xl, xr,
                  da, dl, dr);
    out += buf;
}

}  // namespace

ProblemDocument load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemParseError(path + ": cannot open file");

    std::map<std::string, RawEntry> entries;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trimmed(line);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') fail(path, lineno, "unterminated section header");
            section = trimmed(text.substr(1, text.size() - 2));
            if (section != "bounds" && section != "options") {
                fail(path, lineno, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(path, lineno, "expected key = value");
        const std::string key = trimmed(text.substr(0, eq));
        const std::string value = trimmed(text.substr(eq + 1));
        if (key.empty()) fail(path, lineno, "empty key");
        if (value.empty()) fail(path, lineno, key + ": empty value");
        const std::string full = section.empty() ? key : section + "." + key;

        static const char* known[] = {"f",          "g",           "u",
                                      "beta",       "eta",         "bounds.k",
                                      "bounds.h",   "bounds.M",    "options.tol",
                                      "options.grid", "options.max_iter", "options.damping"};
        bool ok = false;
        for (const char* k : known) ok = ok || full == k;
        if (!ok) fail(path, lineno, "unknown key '" + full + "'");
        if (entries.count(full)) {
            fail(path, lineno,
                 "duplicate key '" + full + "' (first on line " +
                     std::to_string(entries[full].line) + ")");
        }
        entries[full] = {value, lineno};
    }

    auto take = [&](const char* key) -> std::optional<RawEntry> {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        return it->second;
    };
    auto require = [&](const char* key) -> RawEntry {
        auto e = take(key);
        if (!e) throw ProblemParseError(path + ": missing required key '" + std::string(key) + "'");
        return *e;
    };

    ProblemDocument doc;
    auto resolve = [&](const RawEntry& e, const std::string& key, auto&& maker) {
        try {
            return maker(e.value);
        } catch (const CatalogError& err) {
            fail(path, e.line, key + ": " + err.what());
        }
    };

    const RawEntry fe = require("f");
    doc.f_name = fe.value;
    doc.spec.f = resolve(fe, "f", [](const std::string& s) { return make_integrand2(s); });
    const RawEntry ge = require("g");
    doc.g_name = ge.value;
    doc.spec.g = resolve(ge, "g", [](const std::string& s) { return make_integrand2(s); });
    if (auto ue = take("u")) {
        doc.u_name = ue->value;
        doc.spec.u = resolve(*ue, "u", [](const std::string& s) { return make_regulated(s); });
    } else {
        doc.u_name = "zero";
    }
    if (auto be = take("beta")) {
        doc.spec.beta = parse_real(path, be->line, "beta", be->value);
        if (!std::isfinite(doc.spec.beta)) fail(path, be->line, "beta must be finite");
    }
    if (auto ee = take("eta")) {
        doc.spec.eta = parse_real(path, ee->line, "eta", ee->value);
        if (!(doc.spec.eta >= 0.0 && doc.spec.eta <= 1.0)) {
            fail(path, ee->line, "eta out of [0,1]");
        }
    }
    const RawEntry ke = require("bounds.k");
    doc.k_name = ke.value;
    doc.spec.bounds.k = resolve(ke, "bounds.k", [](const std::string& s) { return make_integrand(s); });
    const RawEntry he = require("bounds.h");
    doc.h_name = he.value;
    doc.spec.bounds.h = resolve(he, "bounds.h", [](const std::string& s) { return make_integrand(s); });
    if (auto me = take("bounds.M")) {
        doc.spec.bounds.m = parse_real(path, me->line, "M", me->value);
        if (!(doc.spec.bounds.m >= 0.0)) fail(path, me->line, "M must be nonnegative");
    }
    if (auto oe = take("options.tol")) {
        doc.options.tol = parse_real(path, oe->line, "tol", oe->value);
        if (!(doc.options.tol > 0.0)) fail(path, oe->line, "tol must be positive");
    }
    if (auto oe = take("options.grid")) {
        doc.options.grid = parse_int(path, oe->line, "grid", oe->value);
        if (doc.options.grid < 2) fail(path, oe->line, "grid must be at least 2");
    }
    if (auto oe = take("options.max_iter")) {
        doc.options.max_iter = parse_int(path, oe->line, "max_iter", oe->value);
        if (doc.options.max_iter < 1) fail(path, oe->line, "max_iter must be at least 1");
    }
    if (auto oe = take("options.damping")) {
        doc.options.damping = parse_real(path, oe->line, "damping", oe->value);
        if (!(doc.options.damping > 0.0 && doc.options.damping <= 1.0)) {
            fail(path, oe->line, "damping must lie in (0,1]");
        }
    }
    return doc;
}

std::string solution_csv(const SolutionProfile& sol, const RegulatedFn& u) {
    std::string out = "t,x,x_left,x_right,dx,dx_left,dx_right\n";
    const std::vector<double>& grid = sol.grid();

    std::vector<double> expand;
    for (const Breakpoint& b : u.breakpoints()) expand.push_back(b.t);

    auto sides = [](const GridProfile& p, std::size_t i) {
        const Breakpoint* j = p.jump_at(p.grid[i]);
        const double at = p.at(i);
        if (!j) return std::array<double, 3>{at, at, at};
        return std::array<double, 3>{at, j->left, j->right};
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const auto [xa, xl, xr] = sides(sol.x, i);
        const auto [da, dl, dr] = sides(sol.dx, i);
        const bool expanded =
            std::find(expand.begin(), expand.end(), t) != expand.end();
        if (expanded) {
            append_row(out, t, xl, xl, xl, dl, dl, dl);
            append_row(out, t, xa, xl, xr, da, dl, dr);
            append_row(out, t, xr, xr, xr, dr, dr, dr);
        } else {
            append_row(out, t, xa, xl, xr, da, dl, dr);
        }
    }
    return out;
}

std::string check_json(const ProblemDocument& doc, const HypothesisReport& report) {
    ordered_json j;
    j["problem"] = problem_echo(doc);
    j["hypotheses"] = hypotheses_echo(report);
    return j.dump(2) + "\n";
}

std::string solve_json(const ProblemDocument& doc, const SolveResult& result) {
    ordered_json j;
    j["problem"] = problem_echo(doc);
    j["hypotheses"] = hypotheses_echo(result.report);
    ordered_json s;
    s["converged"] = result.converged;
    s["iterations"] = result.iterations;
    s["residual"] = json_real(result.residual);
    s["bc_residuals"] = {json_real(result.bc_residuals[0]), json_real(result.bc_residuals[1])};
    s["norm_x"] = json_real(result.norm_x);
    s["within_ball"] = result.within_ball;
    ordered_json hist = ordered_json::array();
    for (double r : result.residual_history) hist.push_back(json_real(r));
    s["residual_history"] = hist;
    j["solve"] = s;
    return j.dump(2) + "\n";
}

}  // namespace dbvp
