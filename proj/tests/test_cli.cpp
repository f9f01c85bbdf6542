#include <catch2/catch_amalgamated.hpp>

#include "dbvp/problem_io.hpp"
#include "dbvp/solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using dbvp::ProblemDocument;
using dbvp::ProblemParseError;
using dbvp::SolveResult;

namespace {

std::string problems_dir() { return DBVP_PROBLEMS_DIR; }

// Writes content to a scratch problem file and returns its path.
std::string scratch_file(const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / "dbvp_test_case.problem";
    std::ofstream out(path);
    out << content;
    out.close();
    return path.string();
}

// Loads content and returns the parse-error message, or "" if it loaded.
std::string parse_error(const std::string& content) {
    try {
        dbvp::load_problem(scratch_file(content));
    } catch (const ProblemParseError& e) {
        return e.what();
    }
    return "";
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

TEST_CASE("the shipped problem files load with their stated data") {
    const ProblemDocument a = dbvp::load_problem(problems_dir() + "/example41.problem");
    REQUIRE(a.spec.beta == 4.0);
    REQUIRE(a.spec.eta == 0.25);
    REQUIRE(a.spec.bounds.m == 1.0);
    REQUIRE(a.f_name == "f41");
    REQUIRE(a.g_name == "gstar");
    REQUIRE(a.u_name == "heaviside(0.5)");
    REQUIRE(a.k_name == "k41");
    REQUIRE(a.h_name == "const(1)");
    REQUIRE(a.options.tol == 1e-8);
    REQUIRE(a.options.grid == 1025);

    const ProblemDocument b = dbvp::load_problem(problems_dir() + "/example42.problem");
    REQUIRE(b.spec.beta == -1.0 / 6.0);
    REQUIRE(b.spec.eta == 2.0 / 3.0);
    REQUIRE(b.u_name == "weierstrass(1e-12)");
    REQUIRE(b.h_name == "h42");

    const ProblemDocument z = dbvp::load_problem(problems_dir() + "/zero.problem");
    REQUIRE(z.spec.beta == 0.0);
    REQUIRE(z.u_name == "zero");

    const ProblemDocument p = dbvp::load_problem(problems_dir() + "/probe_constant.problem");
    REQUIRE(p.options.tol == 1e-10);
    REQUIRE(p.spec.bounds.m == 0.0);
}

TEST_CASE("parse failures carry the offending line") {
    const std::string base = "f = zero\ng = zero\n[bounds]\nk = zero\nh = zero\n";

    std::string msg = parse_error("f = zero\nf = one\ng = zero\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find(":2:") != std::string::npos);
    REQUIRE(msg.find("duplicate key 'f'") != std::string::npos);
    REQUIRE(msg.find("first on line 1") != std::string::npos);

    // the section open at the failure point is part of the reported key
    msg = parse_error(base + "flux = 1\n");
    REQUIRE(msg.find(":6:") != std::string::npos);
    REQUIRE(msg.find("unknown key 'bounds.flux'") != std::string::npos);

    msg = parse_error("f = zero\ng = zero\neta = 2\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find(":3:") != std::string::npos);
    REQUIRE(msg.find("eta out of [0,1]") != std::string::npos);

    msg = parse_error("f = zero\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find("missing required key 'g'") != std::string::npos);

    msg = parse_error("f = zero\ng = zero\n");
    REQUIRE(msg.find("missing required key 'bounds.k'") != std::string::npos);

    msg = parse_error("f = zero\ng = zero\nbeta = abc\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find(":3:") != std::string::npos);
    REQUIRE(msg.find("beta") != std::string::npos);
    REQUIRE(msg.find("not a number") != std::string::npos);

    msg = parse_error("f = zero\ng = zero\nbeta = 1/0\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find("division by zero") != std::string::npos);

    msg = parse_error("f = wiggle(3)\ng = zero\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find(":1:") != std::string::npos);
    REQUIRE(msg.find("wiggle") != std::string::npos);

    msg = parse_error(base + "[extra]\n");
    REQUIRE(msg.find("unknown section [extra]") != std::string::npos);

    msg = parse_error("f =\ng = zero\n[bounds]\nk = zero\nh = zero\n");
    REQUIRE(msg.find("empty value") != std::string::npos);

    msg = parse_error(base + "[options]\ndamping = 1.5\n");
    REQUIRE(msg.find("damping must lie in (0,1]") != std::string::npos);

    REQUIRE_THROWS_AS(dbvp::load_problem("/nonexistent/never.problem"), ProblemParseError);
}

TEST_CASE("fractions and comments parse the way the files use them") {
    const std::string path = scratch_file(
        "# leading comment\n"
        "f = zero\n"
        "g = zero   # inline comment\n"
        "beta = -1/6\n"
        "eta = 2/3\n"
        "[bounds]\n"
        "k = zero\n"
        "h = zero\n");
    const ProblemDocument doc = dbvp::load_problem(path);
    REQUIRE(doc.spec.beta == -1.0 / 6.0);
    REQUIRE(doc.spec.eta == 2.0 / 3.0);
}

TEST_CASE("solution CSV expands each jump node into three rows") {
    ProblemDocument doc = dbvp::load_problem(problems_dir() + "/example41.problem");
    doc.options.grid = 129;
    doc.options.tol = 1e-6;
    const SolveResult res = dbvp::solve(doc.spec, doc.options);
    REQUIRE(res.converged);

    const std::string csv = dbvp::solution_csv(res.solution, doc.spec.u);
    const std::vector<std::string> lines = split_lines(csv);
    REQUIRE(lines[0] == "t,x,x_left,x_right,dx,dx_left,dx_right");
    // eta = 1/4 and the jump 1/2 both sit on the 129-point lattice
    REQUIRE(res.solution.grid().size() == 129);
    REQUIRE(lines.size() == 1 + 129 + 2);

    std::vector<std::size_t> at_jump;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        REQUIRE(fields.size() == 7);
        for (const std::string& f : fields) {
            REQUIRE(std::isfinite(std::stod(f)));
        }
        if (std::stod(fields[0]) == 0.5) at_jump.push_back(i);
    }
    REQUIRE(at_jump.size() == 3);
    REQUIRE(at_jump[0] + 1 == at_jump[1]);
    REQUIRE(at_jump[1] + 1 == at_jump[2]);

    // middle row shows both one-sided derivatives; they differ by the jump
    const auto mid = split_fields(lines[at_jump[1]]);
    const double dl = std::stod(mid[5]), dr = std::stod(mid[6]);
    REQUIRE(std::abs((dr - dl) + 1.0) < 1e-6);
    // left row repeats the left limits only
    const auto first = split_fields(lines[at_jump[0]]);
    REQUIRE(first[1] == first[2]);
    REQUIRE(first[4] == first[5]);
}

TEST_CASE("reports serialize to stable JSON") {
    const ProblemDocument doc = dbvp::load_problem(problems_dir() + "/example41.problem");
    const dbvp::HypothesisReport rep = dbvp::check_hypotheses(doc.spec);

    const std::string text = dbvp::check_json(doc, rep);
    REQUIRE(text == dbvp::check_json(doc, rep));
    const auto j = nlohmann::json::parse(text);
    REQUIRE(j["problem"]["f"] == "f41");
    REQUIRE(j["problem"]["beta"].get<double>() == 4.0);
    REQUIRE(j["problem"]["bounds"]["M"].get<double>() == 1.0);
    REQUIRE(j["hypotheses"]["norm_K"].get<double>() == rep.norm_K);
    REQUIRE(j["hypotheses"]["condition_ok"].get<bool>());
    REQUIRE(j["hypotheses"]["radius_bracket"].is_null());

    dbvp::SolveOptions opts = doc.options;
    opts.grid = 129;
    opts.tol = 1e-6;
    ProblemDocument small = doc;
    small.options = opts;
    const SolveResult res = dbvp::solve(doc.spec, opts);
    const std::string stext = dbvp::solve_json(small, res);
    const auto s = nlohmann::json::parse(stext);
    REQUIRE(s["solve"]["converged"].get<bool>());
    REQUIRE(s["solve"]["iterations"].get<int>() == res.iterations);
    REQUIRE(s["solve"]["residual_history"].size() ==
            static_cast<std::size_t>(res.iterations));
    REQUIRE(s["solve"]["norm_x"].get<double>() == res.norm_x);
    REQUIRE(s["problem"]["options"]["grid"].get<int>() == 129);

    // a fresh solve of the same document reproduces the bytes
    const SolveResult again = dbvp::solve(doc.spec, opts);
    REQUIRE(dbvp::solve_json(small, again) == stext);
}

TEST_CASE("bracketed sup norms survive the JSON round trip") {
    const ProblemDocument doc = dbvp::load_problem(problems_dir() + "/example42.problem");
    const dbvp::HypothesisReport rep = dbvp::check_hypotheses(doc.spec);
    const auto j = nlohmann::json::parse(dbvp::check_json(doc, rep));
    REQUIRE(j["hypotheses"]["radius_bracket"].is_array());
    REQUIRE(j["hypotheses"]["radius_bracket"].size() == 2);
    const double lo = j["hypotheses"]["radius_bracket"][0].get<double>();
    const double hi = j["hypotheses"]["radius_bracket"][1].get<double>();
    REQUIRE(lo < hi);
    REQUIRE(hi == rep.radius);
}
