#include "dbvp/catalog.hpp"
#include "dbvp/problem_io.hpp"
#include "dbvp/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_condition_failed = 1;
constexpr int exit_input_error = 2;
constexpr int exit_no_convergence = 3;

double parse_cli_real(const std::string& s, const char* what) {
    const auto slash = s.find('/');
    std::size_t used = 0;
    try {
        if (slash != std::string::npos) {
            const std::string num = s.substr(0, slash);
            const std::string den = s.substr(slash + 1);
            const double n = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(s);
            const double d = std::stod(den, &used);
            if (used != den.size() || d == 0.0) throw std::invalid_argument(s);
            return n / d;
        }
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw dbvp::ProblemParseError(std::string(what) + ": not a number: '" + s + "'");
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dbvp::ProblemParseError(path + ": cannot open for writing");
    out << content;
    if (!out.good()) throw dbvp::ProblemParseError(path + ": write failed");
}

int cmd_check(const std::string& file) {
    dbvp::ProblemDocument doc = dbvp::load_problem(file);
    dbvp::validate_spec(doc.spec);
    const dbvp::HypothesisReport rep = dbvp::check_hypotheses(doc.spec);
    std::cout << dbvp::check_json(doc, rep);
    return rep.condition_ok ? exit_ok : exit_condition_failed;
}

struct SolveFlags {
    std::string file;
    std::string out_csv;
    std::string out_json;
    std::optional<double> tol;
    std::optional<int> grid;
    std::optional<int> max_iter;
    std::optional<double> damping;
    bool ignore_condition = false;
};

int cmd_solve(const SolveFlags& flags) {
    dbvp::ProblemDocument doc = dbvp::load_problem(flags.file);
    if (flags.tol) doc.options.tol = *flags.tol;
    if (flags.grid) doc.options.grid = *flags.grid;
    if (flags.max_iter) doc.options.max_iter = *flags.max_iter;
    if (flags.damping) doc.options.damping = *flags.damping;
    doc.options.ignore_condition = flags.ignore_condition;
    dbvp::validate_spec(doc.spec);

    if (!flags.ignore_condition) {
        const dbvp::HypothesisReport rep = dbvp::check_hypotheses(doc.spec);
        if (!rep.condition_ok) {
            if (!flags.out_json.empty()) write_file(flags.out_json, dbvp::check_json(doc, rep));
            std::fprintf(stderr, "smallness condition fails: (|beta|+2)*norm_K = %.17g >= 1\n",
                         rep.smallness);
            return exit_condition_failed;
        }
    }

    const dbvp::SolveResult result = dbvp::solve(doc.spec, doc.options);
    if (!flags.out_json.empty()) write_file(flags.out_json, dbvp::solve_json(doc, result));
    if (!flags.out_csv.empty()) {
        write_file(flags.out_csv, dbvp::solution_csv(result.solution, doc.spec.u));
    }
    std::printf("%s in %d iterations, residual %.17g, norm %.17g\n",
                result.converged ? "converged" : "did not converge", result.iterations,
                result.residual, result.norm_x);
    return result.converged ? exit_ok : exit_no_convergence;
}

int cmd_integrate(const std::string& kind, const std::vector<std::string>& args,
                  std::optional<double> tol) {
    dbvp::IntegralResult r;
    if (kind == "hk") {
        if (args.size() != 3) {
            throw dbvp::ProblemParseError("integrate hk expects: <integrand> <a> <b>");
        }
        const dbvp::Integrand f = dbvp::make_integrand(args[0]);
        const double a = parse_cli_real(args[1], "a");
        const double b = parse_cli_real(args[2], "b");
        r = tol ? dbvp::hk_integrate(f, a, b, *tol) : dbvp::hk_integrate(f, a, b);
    } else if (kind == "hks") {
        if (args.size() != 4) {
            throw dbvp::ProblemParseError("integrate hks expects: <g> <u> <a> <b>");
        }
        const dbvp::RegulatedFn g = dbvp::make_regulated(args[0]);
        const dbvp::RegulatedFn u = dbvp::make_regulated(args[1]);
        const double a = parse_cli_real(args[2], "a");
        const double b = parse_cli_real(args[3], "b");
        r = dbvp::hks_integrate(g, u, a, b, tol.value_or(1e-9));
    } else {
        throw dbvp::ProblemParseError("integrate kind must be hk or hks, got '" + kind + "'");
    }
    std::printf("value = %.17g\n", r.value);
    std::printf("error_estimate = %.17g\n", r.error_estimate);
    std::printf("method = %s\n", dbvp::method_name(r.method).c_str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributional three-point boundary value problem solver"};
    app.require_subcommand(1);

    std::string check_file;
    CLI::App* check = app.add_subcommand("check", "verify problem hypotheses and print the report");
    check->add_option("file", check_file, "problem file")->required();

    SolveFlags sf;
    CLI::App* solve = app.add_subcommand("solve", "run the fixed-point iteration");
    solve->add_option("file", sf.file, "problem file")->required();
    solve->add_option("--out-csv", sf.out_csv, "write the solution table here");
    solve->add_option("--out-json", sf.out_json, "write the run report here");
    solve->add_option("--tol", sf.tol, "residual tolerance override");
    solve->add_option("--grid", sf.grid, "base grid size override");
    solve->add_option("--max-iter", sf.max_iter, "iteration cap override");
    solve->add_option("--damping", sf.damping, "initial damping override");
    solve->add_flag("--ignore-condition", sf.ignore_condition,
                    "iterate even when the smallness condition fails");

    std::string int_kind;
    std::vector<std::string> int_args;
    std::optional<double> int_tol;
    CLI::App* integ = app.add_subcommand("integrate", "one-off quadrature of catalog functions");
    integ->add_option("kind", int_kind, "hk or hks")->required();
    integ->add_option("args", int_args, "hk: <f> <a> <b>; hks: <g> <u> <a> <b>")->expected(-1);
    integ->add_option("--tol", int_tol, "quadrature tolerance");

    try {
        app.parse(argc, argv);
        if (check->parsed()) return cmd_check(check_file);
        if (solve->parsed()) return cmd_solve(sf);
        return cmd_integrate(int_kind, int_args, int_tol);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_input_error;
    } catch (const dbvp::ProblemParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input_error;
    } catch (const dbvp::CatalogError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input_error;
    } catch (const dbvp::PreconditionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input_error;
    } catch (const dbvp::IntegrationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_no_convergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_input_error;
    }
}
