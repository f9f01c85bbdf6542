#pragma once

#include "dbvp/operator.hpp"
#include "dbvp/solver.hpp"

#include <stdexcept>
#include <string>

namespace dbvp {

/// Parse failure with "path:line: message" formatting already applied.
class ProblemParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parsed problem file: the spec itself, solver options (file values
/// overridden by CLI flags later), and the raw catalog names for echoing
/// into reports.
struct ProblemDocument {
    ProblemSpec spec;
    SolveOptions options;
    std::string f_name;
    std::string g_name;
    std::string u_name;
    std::string k_name;
    std::string h_name;
};

/// Load a problem file. Format: `key = value` lines, `#` comments, and two
/// optional sections `[bounds]` and `[options]`. Top-level keys f, g, u,
/// beta, eta; bounds keys k, h, M; options keys tol, grid, max_iter,
/// damping. beta and eta accept plain numbers or fractions like -1/6.
/// Unknown keys, duplicate keys, bad numbers and unresolvable catalog names
/// all raise ProblemParseError with the offending line number.
ProblemDocument load_problem(const std::string& path);

/// Solution CSV: header t,x,x_left,x_right,dx,dx_left,dx_right, one row per
/// grid node at 17 significant digits; at each registered breakpoint of u
/// the node expands to three rows (left limits, the value at the point,
/// right limits).
std::string solution_csv(const SolutionProfile& sol, const RegulatedFn& u);

/// Report documents as deterministic JSON text (stable key order, no
/// environment data). check_json carries the problem echo and hypothesis
/// report; solve_json appends iteration results.
std::string check_json(const ProblemDocument& doc, const HypothesisReport& report);
std::string solve_json(const ProblemDocument& doc, const SolveResult& result);

}  // namespace dbvp
