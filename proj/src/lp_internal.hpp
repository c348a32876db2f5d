#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "reserveflow/kernels.hpp"
#include "reserveflow/lp.hpp"

namespace reserveflow::detail {

struct SparseLp {
    int n = 0;
    kernels::RowMatrix A, G;
    Eigen::VectorXd b, h, c, lo, hi;
};

struct IpmResult {
    enum class Outcome { converged, iteration_limit, diverged, stalled };
    Outcome outcome = Outcome::iteration_limit;
    Eigen::VectorXd x, y, z, zl, zu;
    int iterations = 0;
    double primal_res = 0, dual_res = 0, gap = 0;
};

struct IpmOptions {
    double tolerance = 1e-10;
    double accept = 1e-8;  // fallback acceptance when progress stalls
    int max_iterations = 150;
    Execution execution = Execution::parallel;
};

IpmResult interior_point(const SparseLp& lp, const IpmOptions& opt);

struct Presolved {
    bool infeasible = false;
    std::string reason;
    int infeasible_var = -1;  // set when a variable's bounds cross
    SparseLp reduced;
    std::vector<int> kept_vars, kept_eq, kept_ub;  // reduced index -> original
    std::vector<char> fixed;
    std::vector<double> fixed_value;
    std::vector<int> fix_order;
    std::vector<int> eq_src;          // equality row that pinned a variable, or -1
    std::vector<double> eq_coef;
    std::vector<int> lo_src, hi_src;  // -1: original bound, else ub row
    std::vector<double> lo_coef, hi_coef;
};

Presolved presolve(const LpProblem& p, bool enabled);

// Map a reduced-space IPM answer back onto the original problem.
LpSolution postsolve(const LpProblem& p, const Presolved& pre, const IpmResult& r);

}  // namespace reserveflow::detail
