#pragma once

#include <memory>
#include <string>
#include <vector>

#include "reserveflow/lp.hpp"
#include "reserveflow/model.hpp"
#include "reserveflow/ptdf.hpp"

namespace reserveflow {

using Matrix2 = std::vector<std::vector<double>>;  // [scenario][resource]

// Column and row ids of the scenario model. Row ids are -1 where a row was not
// emitted (line out of service, or a flow row with no coefficients).
struct VariableIndex {
    int n_gens = 0, n_loads = 0, n_lines = 0, n_scenarios = 0;

    int g(int j) const { return j; }
    int r_up(int j) const { return n_gens + j; }
    int r_down(int j) const { return 2 * n_gens + j; }
    int up(int k, int j) const { return block(k) + j; }
    int down(int k, int j) const { return block(k) + n_gens + j; }
    int shed(int k, int l) const { return block(k) + 2 * n_gens + l; }
    int n_vars() const { return block(n_scenarios); }

    int balance = -1;                             // eq row
    std::vector<int> flow_fwd, flow_rev;          // ub rows per line
    std::vector<int> capacity, floor;             // g + r_U <= Gmax,  r_D - g <= -Gmin
    std::vector<int> balance_k;                   // eq rows
    std::vector<std::vector<int>> flow_fwd_k, flow_rev_k;
    std::vector<std::vector<int>> up_link, down_link;  // dG_U - r_U <= 0,  dG_D - r_D <= 0

private:
    int block(int k) const { return 3 * n_gens + k * (2 * n_gens + n_loads); }
};

struct ScenarioModel {
    LpProblem lp;
    VariableIndex index;
    std::shared_ptr<const NetworkModel> network;
};

ScenarioModel build_model_two(const MarketCase& mc);
ScenarioModel build_model_two(const MarketCase& mc, std::shared_ptr<const NetworkModel> net);

struct ClearingSolution {
    std::vector<double> g, r_up, r_down;
    Matrix2 up, down, shed;  // dG_U[k], dG_D[k], dd[k]

    // Price-sign multipliers (lambda = -y). lambda is the system price of the balance row; line
    // multipliers are kept per direction and are both >= 0.
    double lambda = 0.0;
    std::vector<double> mu_fwd, mu_rev;
    std::vector<double> lambda_k;
    Matrix2 mu_fwd_k, mu_rev_k;              // [k][line]
    Matrix2 alpha_up, alpha_lo;               // [k][gen]  on dG_U <= r_U and dG_U >= 0
    Matrix2 beta_up, beta_lo;                 // [k][gen]  on dG_D <= r_D and dG_D >= 0
    Matrix2 tau_up, tau_lo;                   // [k][load] on dd <= d + pi and dd >= 0
    std::vector<double> capacity_dual, floor_dual;

    double expected_total_cost = 0.0;

    ScenarioModel model;
    LpSolution raw;
    KktResiduals kkt;
    std::vector<std::string> degenerate;  // rows/bounds with zero slack and zero multiplier

    // Net line multiplier mu_fwd - mu_rev; k < 0 for the base case.
    std::vector<double> mu(int k = -1) const;
    const NetworkModel& network() const { return *model.network; }
};

ClearingSolution solve_clearing(const MarketCase& mc, const SolverOptions& opt = default_solver_options());
ClearingSolution solve_clearing(ScenarioModel model, const MarketCase& mc,
                                const SolverOptions& opt = default_solver_options());

// Cost of the scenario model objective at a given point.
double expected_cost(const MarketCase& mc, const ClearingSolution& s);

// Traditional clearing: energy plus system-wide reserve requirements, base network only.
struct TraditionalModel {
    LpProblem lp;
    int n_gens = 0;
    int balance = -1, req_up = -1, req_down = -1;
    std::vector<int> flow_fwd, flow_rev;
};

TraditionalModel build_model_one(const MarketCase& mc, double req_up, double req_down);

struct TraditionalSolution {
    std::vector<double> g, r_up, r_down;
    double lambda = 0.0;
    double gamma_up = 0.0, gamma_down = 0.0;  // reserve clearing prices
    std::vector<double> mu_fwd, mu_rev;
    double objective = 0.0;
};

TraditionalSolution solve_traditional(const MarketCase& mc, double req_up, double req_down,
                                      const SolverOptions& opt = default_solver_options());

struct Dispatch {
    std::vector<double> g, r_up, r_down;
};

struct RecourseResult {
    bool feasible = false;
    double expected_cost = 0.0;
    std::vector<std::string> violated;  // certificate rows when infeasible
};

// Hold (g, r_U, r_D) and optimize only the scenario response.
RecourseResult evaluate_recourse_cost(const MarketCase& mc, const Dispatch& fixed,
                                      const SolverOptions& opt = default_solver_options());

// Rows and bounds carrying a nonzero Farkas multiplier.
std::vector<std::string> certificate_rows(const LpProblem& p, const LpCertificate& c);

}  // namespace reserveflow
