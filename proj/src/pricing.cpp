#include "reserveflow/pricing.hpp"

#include <cmath>

#include "reserveflow/errors.hpp"

namespace reserveflow {

namespace {

// lambda - S' mu per bus.
std::vector<double> bus_component(double lambda, const Eigen::MatrixXd& S, const std::vector<double>& mu) {
    Eigen::Map<const Eigen::VectorXd> m(mu.data(), static_cast<Eigen::Index>(mu.size()));
    Eigen::VectorXd w = Eigen::VectorXd::Constant(S.cols(), lambda) - S.transpose() * m;
    return {w.data(), w.data() + w.size()};
}

}  // namespace

PriceSet energy_prices(const ClearingSolution& sol, const MarketCase& mc) {
    const int K = mc.n_scenarios();
    const auto& net = sol.network();
    PriceSet p;
    p.omega0 = bus_component(sol.lambda, net.base.shift.matrix, sol.mu());
    p.omega_k.resize(K);
    for (int k = 0; k < K; ++k)
        p.omega_k[k] = bus_component(sol.lambda_k[k], net.scenarios[k].shift.matrix, sol.mu(k));

    auto bus_sum = [&](int b) {
        double v = p.omega0[b];
        for (int k = 0; k < K; ++k) v += p.omega_k[k][b];
        return v;
    };
    for (const auto& g : mc.generators) p.eta_g.push_back(bus_sum(g.bus));
    for (int l = 0; l < mc.n_loads(); ++l) {
        double adj = 0.0;
        for (int k = 0; k < K; ++k) adj += sol.tau_up[k][l];
        p.shed_adjustment.push_back(adj);
        p.eta_d.push_back(bus_sum(mc.loads[l].bus) - adj);
    }
    return p;
}

void reserve_prices(const ClearingSolution& sol, const MarketCase& mc, PriceSet& out) {
    out.eta_up.assign(mc.n_gens(), 0.0);
    out.eta_down.assign(mc.n_gens(), 0.0);
    for (int k = 0; k < mc.n_scenarios(); ++k)
        for (int j = 0; j < mc.n_gens(); ++j) {
            out.eta_up[j] += sol.alpha_up[k][j];
            out.eta_down[j] += sol.beta_up[k][j];
        }
}

PriceSet price(const ClearingSolution& sol, const MarketCase& mc) {
    auto p = energy_prices(sol, mc);
    reserve_prices(sol, mc, p);
    return p;
}

const char* to_string(ProbeKind k) {
    switch (k) {
        case ProbeKind::energy: return "g";
        case ProbeKind::reserve_up: return "rU";
        case ProbeKind::reserve_down: return "rD";
        case ProbeKind::load: return "d";
    }
    return "?";
}

EnvelopeReport envelope_check(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices,
                              Probe probe, double h, double tolerance, const SolverOptions& opt) {
    EnvelopeReport rep;
    rep.probe = probe;
    const bool is_load = probe.kind == ProbeKind::load;
    if (is_load ? probe.index < 0 || probe.index >= mc.n_loads() : probe.index < 0 || probe.index >= mc.n_gens())
        throw std::out_of_range("probe index out of range");
    rep.resource = std::string(to_string(probe.kind)) + "." +
                   (is_load ? mc.loads[probe.index].name : mc.generators[probe.index].name);

    // cost(t): optimum of the restricted problem with the probed quantity moved by t.
    auto cost = [&](double t, bool& ok) -> double {
        if (is_load) {
            MarketCase c = mc;
            c.loads[probe.index].base_demand += t;
            auto m = build_model_two(c, sol.model.network);
            auto s = solve(m.lp, opt);
            ok = s.status == LpStatus::Optimal;
            return ok ? s.objective : 0.0;
        }
        const int j = probe.index;
        auto m = build_model_two(mc, sol.model.network);
        auto& lp = m.lp;
        const auto& ix = m.index;
        double v[3] = {sol.g[j], sol.r_up[j], sol.r_down[j]};
        const int col[3] = {ix.g(j), ix.r_up(j), ix.r_down(j)};
        v[static_cast<int>(probe.kind)] += t;
        for (int q = 0; q < 3; ++q) {
            lp.cost[col[q]] = 0.0;
            lp.lower[col[q]] = lp.upper[col[q]] = v[q];
        }
        for (int r : {ix.capacity[j], ix.floor[j]}) {
            lp.ub_rows[r].index.clear();
            lp.ub_rows[r].value.clear();
            lp.ub_rows[r].rhs = 0.0;
        }
        auto s = solve(lp, opt);
        ok = s.status == LpStatus::Optimal;
        return ok ? s.objective : 0.0;
    };

    bool mid_ok = false;
    const double c0 = cost(0.0, mid_ok);
    const double cp = cost(h, rep.right_ok);
    const double cm = cost(-h, rep.left_ok);
    if (!mid_ok) throw NumericalFailure("envelope probe: restricted problem at the optimum did not solve");

    switch (probe.kind) {
        case ProbeKind::energy: rep.expected = -prices.eta_g[probe.index]; break;
        case ProbeKind::reserve_up: rep.expected = -prices.eta_up[probe.index]; break;
        case ProbeKind::reserve_down: rep.expected = -prices.eta_down[probe.index]; break;
        case ProbeKind::load: rep.expected = prices.eta_d[probe.index]; break;
    }
    if (rep.right_ok) rep.right = (cp - c0) / h;
    if (rep.left_ok) rep.left = (c0 - cm) / h;
    if (rep.left_ok && rep.right_ok) {
        rep.central = (cp - cm) / (2 * h);
        rep.degenerate = std::abs(rep.right - rep.left) > tolerance;
    } else {
        // A kink at a bound: only one side exists, so the derivative is not two-sided.
        rep.central = rep.right_ok ? rep.right : rep.left;
        rep.degenerate = true;
    }
    rep.error = std::abs(rep.central - rep.expected);
    return rep;
}

}  // namespace reserveflow
