#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reserveflow/clearing.hpp"
#include "reserveflow/pricing.hpp"
#include "reserveflow/settlement.hpp"

namespace reserveflow {

enum class CheckStatus { pass, warn, fail, skipped_degenerate };
const char* to_string(CheckStatus s);  // PASS, WARN, FAIL, SKIPPED-degenerate

struct VerificationReport {
    std::string check;
    CheckStatus status = CheckStatus::pass;
    double worst = 0.0;                 // worst residual seen
    std::vector<std::string> offenders; // concrete violations, or skipped groups
    std::vector<std::string> notes;
};

struct DispatchRatios {
    Matrix2 x, y;  // [k][gen]: dG_U / r_U and dG_D / r_D, 0 where the reserve is 0
};
DispatchRatios dispatch_ratios(const ClearingSolution& sol);

VerificationReport check_uniform_pricing(const MarketCase& mc, const PriceSet& prices, const ClearingSolution& sol,
                                         double tolerance = 1e-6);
VerificationReport check_revenue_adequacy(const SettlementLedger& ledger, double tolerance = 1e-6);
VerificationReport check_kkt_identities(const ClearingSolution& sol, const MarketCase& mc, double tolerance = 1e-6);

struct PhaseAngleResult {
    double objective = 0.0;
    std::vector<double> Lambda;  // base nodal prices
    Matrix2 Lambda_k;            // [k][bus]
    double rent_base = 0.0;
    std::vector<double> rent_k;
};
// Model II written with bus angles and nodal balance rows instead of shift factors.
PhaseAngleResult solve_phase_angle(const MarketCase& mc, const SolverOptions& opt = default_solver_options());

// KKT residual of the angle model at the model II point, with omega on the nodal
// balance rows and every other multiplier carried over by name.
KktResiduals phase_angle_dual_residual(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices);

VerificationReport phase_angle_crosscheck(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices,
                                          double price_tolerance = 1e-5, double objective_tolerance = 1e-6);

struct Comparison {
    double req_up = 0.0, req_down = 0.0;
    double scenario_cost = 0.0;  // model II optimum
    TraditionalSolution traditional;
    bool recourse_feasible = false;
    double recourse_cost = 0.0;
    double gap = 0.0;  // recourse_cost - scenario_cost, when feasible
    std::vector<std::string> violated;
    std::vector<double> eta_up, eta_down;
    // Generators with equal reserve bids both strictly inside their limits: the
    // requirement-based optimum is then not unique, and the recourse verdict can
    // depend on which split the solver returns.
    std::vector<std::string> ties;
};

// Requirements default to the reserve totals of the model II optimum.
Comparison compare_traditional(const MarketCase& mc, const ClearingSolution& sol,
                               std::optional<double> req_up = std::nullopt,
                               std::optional<double> req_down = std::nullopt,
                               const SolverOptions& opt = default_solver_options());
VerificationReport comparison_report(const Comparison& c);

struct VerifyOptions {
    double price_tolerance = 1e-6;
    double adequacy_tolerance = 1e-6;
    double identity_tolerance = 1e-6;
    double crosscheck_tolerance = 1e-5;
    bool phase_angle = true;
};

// Every pricing and settlement check on one cleared case.
std::vector<VerificationReport> verify_all(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices,
                                           const SettlementLedger& ledger, const VerifyOptions& opt = {});
CheckStatus overall(const std::vector<VerificationReport>& reports);

std::string reports_markdown(const std::vector<VerificationReport>& reports);
std::string reports_json(const std::vector<VerificationReport>& reports);

}  // namespace reserveflow
