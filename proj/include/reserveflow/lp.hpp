#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "reserveflow/execution.hpp"

namespace reserveflow {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpRow {
    std::string name;
    std::vector<int> index;
    std::vector<double> value;
    double rhs = 0.0;
};

// minimize c'x  s.t.  eq rows a'x = b,  ub rows a'x <= b,  lo <= x <= hi.
//
// Multiplier signs follow L = c'x + y'(A x - b) + z'(G x - h) - zl'(x - lo) + zu'(x - hi),
// so z, zl, zu >= 0 at an optimum and c + A'y + G'z - zl + zu = 0.
struct LpProblem {
    std::vector<double> cost, lower, upper;
    std::vector<std::string> var_names;
    std::vector<LpRow> eq_rows, ub_rows;

    int add_variable(std::string name, double c, double lo, double hi);
    int add_eq(std::string name, std::vector<int> index, std::vector<double> value, double rhs);
    int add_ub(std::string name, std::vector<int> index, std::vector<double> value, double rhs);

    int n_vars() const { return static_cast<int>(cost.size()); }
    int n_eq() const { return static_cast<int>(eq_rows.size()); }
    int n_ub() const { return static_cast<int>(ub_rows.size()); }

    double objective(const std::vector<double>& x) const;
    // Throws std::invalid_argument on inconsistent dimensions or non-finite data.
    void check() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus s);

struct LpCertificate {
    // Infeasible: Farkas multipliers with A'y + G'z - zl + zu = 0, z,zl,zu >= 0 and
    // b'y + h'z - lo'zl + hi'zu < 0.
    std::vector<double> eq, ub, lower, upper;
    // Unbounded: direction d with c'd < 0 that keeps every constraint satisfied.
    std::vector<double> ray;
};

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    std::vector<double> x, eq_duals, ub_duals, lower_duals, upper_duals;
    double objective = 0.0;
    int iterations = 0;
    std::string method;
    LpCertificate certificate;
};

struct SolverOptions {
    double tolerance = 1e-10;  // interior-point stopping target, scaled
    int max_iterations = 150;
    Execution execution = Execution::parallel;
    bool presolve = true;
};

// Default options with RESERVEFLOW_SOLVER_TOL applied when set.
SolverOptions default_solver_options();

LpSolution solve(const LpProblem& p, const SolverOptions& opt = default_solver_options());

// Exhaustive basis enumeration; only for small test problems.
LpSolution vertex_oracle(const LpProblem& p, long max_combinations = 2'000'000);

struct KktResiduals {
    double primal = 0, dual = 0, stationarity = 0, complementarity = 0, gap = 0;
    double worst() const;
};

KktResiduals check_kkt(const LpProblem& p, const LpSolution& s);

// Constraints whose slack and multiplier are both below tol.
std::vector<std::string> degenerate_constraints(const LpProblem& p, const LpSolution& s, double tol = 1e-7);

// CPLEX-style LP text, for cross-checking with external solvers.
void write_lp_text(const LpProblem& p, std::ostream& os);

}  // namespace reserveflow
