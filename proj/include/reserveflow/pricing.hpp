#pragma once

#include <string>
#include <vector>

#include "reserveflow/clearing.hpp"

namespace reserveflow {

struct PriceSet {
    std::vector<double> omega0;  // per bus
    Matrix2 omega_k;             // [k][bus]
    std::vector<double> eta_g, eta_d, eta_up, eta_down;
    std::vector<double> shed_adjustment;  // sum_k tau_up[k][l]
};

PriceSet energy_prices(const ClearingSolution& sol, const MarketCase& mc);
// Fills eta_up / eta_down only.
void reserve_prices(const ClearingSolution& sol, const MarketCase& mc, PriceSet& out);
// Both of the above.
PriceSet price(const ClearingSolution& sol, const MarketCase& mc);

enum class ProbeKind { energy, reserve_up, reserve_down, load };
const char* to_string(ProbeKind k);

struct Probe {
    ProbeKind kind = ProbeKind::energy;
    int index = 0;  // generator, or load for ProbeKind::load
};

struct EnvelopeReport {
    Probe probe;
    std::string resource;
    double expected = 0.0;  // -eta for generator quantities, +eta^d for a load
    double left = 0.0, right = 0.0, central = 0.0;
    bool left_ok = false, right_ok = false;  // perturbed problem solved
    bool degenerate = false;                 // one-sided differences disagree
    double error = 0.0;                      // |difference - expected|
};

// Re-solve with one quantity held at optimum +/- h. Generator quantities are held
// with that generator's own bids and limits removed, so the difference measures
// the cost of everybody else.
EnvelopeReport envelope_check(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices,
                              Probe probe, double h = 1e-3, double tolerance = 1e-2,
                              const SolverOptions& opt = default_solver_options());

}  // namespace reserveflow
