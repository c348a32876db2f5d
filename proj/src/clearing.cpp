#include "reserveflow/clearing.hpp"

#include <algorithm>
#include <cmath>

#include "reserveflow/errors.hpp"

namespace reserveflow {

namespace {

// One direction of a flow limit. Coefficients of the net injection columns are
// gathered per line; rhs moves the demand term across.
struct FlowTerms {
    std::vector<int> idx;
    std::vector<double> val;
    double demand_flow = 0.0;
};

void add_flow_pair(LpProblem& lp, const std::string& tag, const MarketCase& mc, int line,
                   const FlowTerms& t, double cap, int& fwd, int& rev) {
    fwd = rev = -1;
    if (t.idx.empty()) return;
    std::vector<double> neg(t.val.size());
    std::transform(t.val.begin(), t.val.end(), neg.begin(), [](double v) { return -v; });
    const std::string ln = "L" + std::to_string(mc.lines[line].id);
    fwd = lp.add_ub(tag + ".flow+." + ln, t.idx, t.val, cap + t.demand_flow);
    rev = lp.add_ub(tag + ".flow-." + ln, t.idx, std::move(neg), cap - t.demand_flow);
}

double dual_or_zero(const std::vector<double>& v, int i) { return i < 0 ? 0.0 : v[i]; }

}  // namespace

std::vector<double> ClearingSolution::mu(int k) const {
    const auto& f = k < 0 ? mu_fwd : mu_fwd_k[k];
    const auto& r = k < 0 ? mu_rev : mu_rev_k[k];
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] - r[i];
    return out;
}

ScenarioModel build_model_two(const MarketCase& mc) {
    return build_model_two(mc, std::make_shared<const NetworkModel>(build_network(mc)));
}

ScenarioModel build_model_two(const MarketCase& mc, std::shared_ptr<const NetworkModel> net) {
    const int ng = mc.n_gens(), nd = mc.n_loads(), nl = mc.n_lines(), K = mc.n_scenarios();
    ScenarioModel m;
    m.network = std::move(net);
    auto& ix = m.index;
    ix.n_gens = ng;
    ix.n_loads = nd;
    ix.n_lines = nl;
    ix.n_scenarios = K;
    auto& lp = m.lp;

    for (const auto& g : mc.generators) lp.add_variable("g." + g.name, g.c_energy, -kInf, kInf);
    for (const auto& g : mc.generators) lp.add_variable("rU." + g.name, g.c_ru, 0.0, g.ru_max);
    for (const auto& g : mc.generators) lp.add_variable("rD." + g.name, g.c_rd, 0.0, g.rd_max);
    for (int k = 0; k < K; ++k) {
        const auto& s = mc.scenarios[k];
        const double e = s.probability;
        for (int j = 0; j < ng; ++j)
            lp.add_variable(s.name + ".dGU." + mc.generators[j].name, e * s.c_redispatch_up[j], 0.0, kInf);
        for (int j = 0; j < ng; ++j)
            lp.add_variable(s.name + ".dGD." + mc.generators[j].name, -e * s.c_redispatch_down[j], 0.0, kInf);
        for (int l = 0; l < nd; ++l)
            lp.add_variable(s.name + ".dd." + mc.loads[l].name, e * mc.loads[l].c_shed, 0.0,
                            mc.scenario_demand(k, l));
    }

    // Base case.
    {
        std::vector<int> idx(ng);
        std::vector<double> one(ng, 1.0);
        double total = 0.0;
        for (int j = 0; j < ng; ++j) idx[j] = ix.g(j);
        for (const auto& d : mc.loads) total += d.base_demand;
        ix.balance = lp.add_eq("base.balance", idx, one, total);
    }
    const auto& S0 = m.network->base.shift.matrix;
    ix.flow_fwd.assign(nl, -1);
    ix.flow_rev.assign(nl, -1);
    for (int i = 0; i < nl; ++i) {
        if (!m.network->base.in_service[i]) continue;
        FlowTerms t;
        for (int j = 0; j < ng; ++j) {
            double a = S0(i, mc.generators[j].bus);
            if (a != 0.0) {
                t.idx.push_back(ix.g(j));
                t.val.push_back(a);
            }
        }
        for (const auto& d : mc.loads) t.demand_flow += S0(i, d.bus) * d.base_demand;
        add_flow_pair(lp, "base", mc, i, t, m.network->base.capacity[i], ix.flow_fwd[i], ix.flow_rev[i]);
    }
    ix.capacity.resize(ng);
    ix.floor.resize(ng);
    for (int j = 0; j < ng; ++j) {
        const auto& g = mc.generators[j];
        ix.capacity[j] = lp.add_ub("cap." + g.name, {ix.g(j), ix.r_up(j)}, {1.0, 1.0}, g.g_max);
        ix.floor[j] = lp.add_ub("floor." + g.name, {ix.r_down(j), ix.g(j)}, {1.0, -1.0}, -g.g_min);
    }

    // Scenarios.
    ix.balance_k.resize(K);
    ix.flow_fwd_k.assign(K, std::vector<int>(nl, -1));
    ix.flow_rev_k.assign(K, std::vector<int>(nl, -1));
    ix.up_link.assign(K, std::vector<int>(ng, -1));
    ix.down_link.assign(K, std::vector<int>(ng, -1));
    for (int k = 0; k < K; ++k) {
        const auto& s = mc.scenarios[k];
        const auto& net = m.network->scenarios[k];
        {
            std::vector<int> idx;
            std::vector<double> val;
            double total = 0.0;
            for (int j = 0; j < ng; ++j) {
                idx.insert(idx.end(), {ix.g(j), ix.up(k, j), ix.down(k, j)});
                val.insert(val.end(), {1.0, 1.0, -1.0});
            }
            for (int l = 0; l < nd; ++l) {
                idx.push_back(ix.shed(k, l));
                val.push_back(1.0);
                total += mc.scenario_demand(k, l);
            }
            ix.balance_k[k] = lp.add_eq(s.name + ".balance", std::move(idx), std::move(val), total);
        }
        const auto& Sk = net.shift.matrix;
        for (int i = 0; i < nl; ++i) {
            if (!net.in_service[i]) continue;
            FlowTerms t;
            for (int j = 0; j < ng; ++j) {
                double a = Sk(i, mc.generators[j].bus);
                if (a == 0.0) continue;
                t.idx.insert(t.idx.end(), {ix.g(j), ix.up(k, j), ix.down(k, j)});
                t.val.insert(t.val.end(), {a, a, -a});
            }
            for (int l = 0; l < nd; ++l) {
                double a = Sk(i, mc.loads[l].bus);
                if (a == 0.0) continue;
                t.idx.push_back(ix.shed(k, l));
                t.val.push_back(a);
                t.demand_flow += a * mc.scenario_demand(k, l);
            }
            add_flow_pair(lp, s.name, mc, i, t, net.capacity[i], ix.flow_fwd_k[k][i], ix.flow_rev_k[k][i]);
        }
        for (int j = 0; j < ng; ++j) {
            const auto& nm = mc.generators[j].name;
            ix.up_link[k][j] = lp.add_ub(s.name + ".up." + nm, {ix.up(k, j), ix.r_up(j)}, {1.0, -1.0}, 0.0);
            ix.down_link[k][j] =
                lp.add_ub(s.name + ".down." + nm, {ix.down(k, j), ix.r_down(j)}, {1.0, -1.0}, 0.0);
        }
    }
    return m;
}

std::vector<std::string> certificate_rows(const LpProblem& p, const LpCertificate& c) {
    double scale = 0.0;
    for (auto* v : {&c.eq, &c.ub, &c.lower, &c.upper})
        for (double x : *v) scale = std::max(scale, std::abs(x));
    std::vector<std::string> out;
    if (scale == 0.0) return out;
    const double tol = 1e-7 * scale;
    for (int i = 0; i < p.n_eq() && i < int(c.eq.size()); ++i)
        if (std::abs(c.eq[i]) > tol) out.push_back(p.eq_rows[i].name);
    for (int i = 0; i < p.n_ub() && i < int(c.ub.size()); ++i)
        if (c.ub[i] > tol) out.push_back(p.ub_rows[i].name);
    for (int j = 0; j < p.n_vars() && j < int(c.lower.size()); ++j)
        if (c.lower[j] > tol) out.push_back(p.var_names[j] + ".lower");
    for (int j = 0; j < p.n_vars() && j < int(c.upper.size()); ++j)
        if (c.upper[j] > tol) out.push_back(p.var_names[j] + ".upper");
    return out;
}

namespace {

[[noreturn]] void throw_status(const LpProblem& lp, const LpSolution& s) {
    if (s.status == LpStatus::Infeasible) {
        auto rows = certificate_rows(lp, s.certificate);
        std::string msg = "market is infeasible";
        if (!rows.empty()) {
            msg += "; certificate rows:";
            for (std::size_t i = 0; i < std::min<std::size_t>(rows.size(), 8); ++i) msg += " " + rows[i];
            if (rows.size() > 8) msg += " ...";
        }
        throw InfeasibleMarket(msg, std::move(rows));
    }
    throw UnboundedMarket("market objective is unbounded below");
}

}  // namespace

ClearingSolution solve_clearing(const MarketCase& mc, const SolverOptions& opt) {
    return solve_clearing(build_model_two(mc), mc, opt);
}

ClearingSolution solve_clearing(ScenarioModel model, const MarketCase& mc, const SolverOptions& opt) {
    const int ng = mc.n_gens(), nd = mc.n_loads(), nl = mc.n_lines(), K = mc.n_scenarios();
    ClearingSolution out;
    out.model = std::move(model);
    const auto& lp = out.model.lp;
    const auto& ix = out.model.index;
    out.raw = solve(lp, opt);
    if (out.raw.status != LpStatus::Optimal) throw_status(lp, out.raw);
    const auto& s = out.raw;
    const auto& x = s.x;

    out.g.resize(ng);
    out.r_up.resize(ng);
    out.r_down.resize(ng);
    out.capacity_dual.resize(ng);
    out.floor_dual.resize(ng);
    for (int j = 0; j < ng; ++j) {
        out.g[j] = x[ix.g(j)];
        out.r_up[j] = x[ix.r_up(j)];
        out.r_down[j] = x[ix.r_down(j)];
        out.capacity_dual[j] = s.ub_duals[ix.capacity[j]];
        out.floor_dual[j] = s.ub_duals[ix.floor[j]];
    }
    out.lambda = -s.eq_duals[ix.balance];
    out.mu_fwd.resize(nl);
    out.mu_rev.resize(nl);
    for (int i = 0; i < nl; ++i) {
        out.mu_fwd[i] = dual_or_zero(s.ub_duals, ix.flow_fwd[i]);
        out.mu_rev[i] = dual_or_zero(s.ub_duals, ix.flow_rev[i]);
    }

    auto grid = [](int K, int n) { return Matrix2(K, std::vector<double>(n, 0.0)); };
    out.up = out.down = out.alpha_up = out.alpha_lo = out.beta_up = out.beta_lo = grid(K, ng);
    out.shed = out.tau_up = out.tau_lo = grid(K, nd);
    out.mu_fwd_k = out.mu_rev_k = grid(K, nl);
    out.lambda_k.resize(K);
    for (int k = 0; k < K; ++k) {
        out.lambda_k[k] = -s.eq_duals[ix.balance_k[k]];
        for (int i = 0; i < nl; ++i) {
            out.mu_fwd_k[k][i] = dual_or_zero(s.ub_duals, ix.flow_fwd_k[k][i]);
            out.mu_rev_k[k][i] = dual_or_zero(s.ub_duals, ix.flow_rev_k[k][i]);
        }
        for (int j = 0; j < ng; ++j) {
            out.up[k][j] = x[ix.up(k, j)];
            out.down[k][j] = x[ix.down(k, j)];
            out.alpha_up[k][j] = s.ub_duals[ix.up_link[k][j]];
            out.alpha_lo[k][j] = s.lower_duals[ix.up(k, j)];
            out.beta_up[k][j] = s.ub_duals[ix.down_link[k][j]];
            out.beta_lo[k][j] = s.lower_duals[ix.down(k, j)];
        }
        for (int l = 0; l < nd; ++l) {
            out.shed[k][l] = x[ix.shed(k, l)];
            out.tau_up[k][l] = s.upper_duals[ix.shed(k, l)];
            out.tau_lo[k][l] = s.lower_duals[ix.shed(k, l)];
        }
    }
    out.expected_total_cost = expected_cost(mc, out);
    out.kkt = check_kkt(lp, s);
    out.degenerate = degenerate_constraints(lp, s);
    return out;
}

double expected_cost(const MarketCase& mc, const ClearingSolution& s) {
    double c = 0.0;
    for (int j = 0; j < mc.n_gens(); ++j) {
        const auto& g = mc.generators[j];
        c += g.c_energy * s.g[j] + g.c_ru * s.r_up[j] + g.c_rd * s.r_down[j];
    }
    for (int k = 0; k < mc.n_scenarios(); ++k) {
        const auto& sc = mc.scenarios[k];
        double ck = 0.0;
        for (int j = 0; j < mc.n_gens(); ++j)
            ck += sc.c_redispatch_up[j] * s.up[k][j] - sc.c_redispatch_down[j] * s.down[k][j];
        for (int l = 0; l < mc.n_loads(); ++l) ck += mc.loads[l].c_shed * s.shed[k][l];
        c += sc.probability * ck;
    }
    return c;
}

TraditionalModel build_model_one(const MarketCase& mc, double req_up, double req_down) {
    const int ng = mc.n_gens(), nl = mc.n_lines();
    TraditionalModel m;
    m.n_gens = ng;
    auto& lp = m.lp;
    for (const auto& g : mc.generators) lp.add_variable("g." + g.name, g.c_energy, -kInf, kInf);
    for (const auto& g : mc.generators) lp.add_variable("rU." + g.name, g.c_ru, 0.0, g.ru_max);
    for (const auto& g : mc.generators) lp.add_variable("rD." + g.name, g.c_rd, 0.0, g.rd_max);

    std::vector<int> gi(ng), ui(ng), di(ng);
    for (int j = 0; j < ng; ++j) {
        gi[j] = j;
        ui[j] = ng + j;
        di[j] = 2 * ng + j;
    }
    double total = 0.0;
    for (const auto& d : mc.loads) total += d.base_demand;
    m.balance = lp.add_eq("base.balance", gi, std::vector<double>(ng, 1.0), total);

    auto net = scenario_network(mc, -1);
    const auto& S = net.shift.matrix;
    m.flow_fwd.assign(nl, -1);
    m.flow_rev.assign(nl, -1);
    for (int i = 0; i < nl; ++i) {
        if (!net.in_service[i]) continue;
        FlowTerms t;
        for (int j = 0; j < ng; ++j) {
            double a = S(i, mc.generators[j].bus);
            if (a != 0.0) {
                t.idx.push_back(j);
                t.val.push_back(a);
            }
        }
        for (const auto& d : mc.loads) t.demand_flow += S(i, d.bus) * d.base_demand;
        add_flow_pair(lp, "base", mc, i, t, net.capacity[i], m.flow_fwd[i], m.flow_rev[i]);
    }
    for (int j = 0; j < ng; ++j) {
        const auto& g = mc.generators[j];
        lp.add_ub("cap." + g.name, {j, ng + j}, {1.0, 1.0}, g.g_max);
        lp.add_ub("floor." + g.name, {2 * ng + j, j}, {1.0, -1.0}, -g.g_min);
    }
    m.req_up = lp.add_eq("reserve.up", ui, std::vector<double>(ng, 1.0), req_up);
    m.req_down = lp.add_eq("reserve.down", di, std::vector<double>(ng, 1.0), req_down);
    return m;
}

TraditionalSolution solve_traditional(const MarketCase& mc, double req_up, double req_down,
                                      const SolverOptions& opt) {
    auto m = build_model_one(mc, req_up, req_down);
    auto s = solve(m.lp, opt);
    if (s.status != LpStatus::Optimal) throw_status(m.lp, s);
    const int ng = m.n_gens;
    TraditionalSolution out;
    out.g.assign(s.x.begin(), s.x.begin() + ng);
    out.r_up.assign(s.x.begin() + ng, s.x.begin() + 2 * ng);
    out.r_down.assign(s.x.begin() + 2 * ng, s.x.begin() + 3 * ng);
    out.lambda = -s.eq_duals[m.balance];
    out.gamma_up = -s.eq_duals[m.req_up];
    out.gamma_down = -s.eq_duals[m.req_down];
    for (std::size_t i = 0; i < m.flow_fwd.size(); ++i) {
        out.mu_fwd.push_back(dual_or_zero(s.ub_duals, m.flow_fwd[i]));
        out.mu_rev.push_back(dual_or_zero(s.ub_duals, m.flow_rev[i]));
    }
    out.objective = s.objective;
    return out;
}

RecourseResult evaluate_recourse_cost(const MarketCase& mc, const Dispatch& fixed, const SolverOptions& opt) {
    const int ng = mc.n_gens();
    if (int(fixed.g.size()) != ng || int(fixed.r_up.size()) != ng || int(fixed.r_down.size()) != ng)
        throw std::invalid_argument("fixed dispatch does not match the generator count");
    auto m = build_model_two(mc);
    auto& lp = m.lp;
    for (int j = 0; j < ng; ++j) {
        lp.lower[m.index.g(j)] = lp.upper[m.index.g(j)] = fixed.g[j];
        lp.lower[m.index.r_up(j)] = lp.upper[m.index.r_up(j)] = fixed.r_up[j];
        lp.lower[m.index.r_down(j)] = lp.upper[m.index.r_down(j)] = fixed.r_down[j];
    }
    auto s = solve(lp, opt);
    RecourseResult r;
    if (s.status == LpStatus::Optimal) {
        r.feasible = true;
        r.expected_cost = s.objective;
    } else if (s.status == LpStatus::Infeasible) {
        r.violated = certificate_rows(lp, s.certificate);
    } else {
        throw UnboundedMarket("recourse problem is unbounded");
    }
    return r;
}

}  // namespace reserveflow
