#include "reserveflow/settlement.hpp"

#include <cmath>
#include <fmt/format.h>
#include <sstream>

#include "reserveflow/errors.hpp"

namespace reserveflow {

const char* row_label(LedgerRow r) {
    switch (r) {
        case LedgerRow::gamma_d: return "Gamma_d";
        case LedgerRow::pi_d: return "Pi_d";
        case LedgerRow::phi_d: return "eps_Phi_d";
        case LedgerRow::gamma_g: return "Gamma_g";
        case LedgerRow::gamma_up: return "Gamma_U";
        case LedgerRow::gamma_down: return "Gamma_D";
        case LedgerRow::phi_up: return "eps_Phi_U";
        case LedgerRow::phi_down: return "eps_Phi_D";
        case LedgerRow::delta: return "Delta";
    }
    return "?";
}

double LedgerColumn::residual() const {
    using R = LedgerRow;
    const auto& c = *this;
    return (c[R::gamma_d] + c[R::pi_d]) - (c[R::gamma_g] + c[R::gamma_up] + c[R::gamma_down] + c[R::phi_up] -
                                           c[R::phi_down] + c[R::phi_d] + c[R::delta]);
}

double LedgerColumn::gross() const {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

SettlementLedger settle_ex_ante(const ClearingSolution& sol, const PriceSet& prices, const MarketCase& mc) {
    using R = LedgerRow;
    const int K = mc.n_scenarios(), ng = mc.n_gens(), nd = mc.n_loads();
    SettlementLedger L;
    L.columns.resize(K + 1);
    L.columns[0].name = "Base";
    L.gamma_g.assign(K + 1, std::vector<double>(ng, 0.0));
    L.gamma_up = L.gamma_down = L.gamma_g;
    L.gamma_d.assign(K + 1, std::vector<double>(nd, 0.0));
    L.fluctuation_by_scenario.assign(K, std::vector<double>(nd, 0.0));
    L.fluctuation_payment.assign(nd, 0.0);

    auto energy = [&](int col, const std::vector<double>& omega) {
        auto& c = L.columns[col];
        for (int j = 0; j < ng; ++j) {
            L.gamma_g[col][j] = omega[mc.generators[j].bus] * sol.g[j];
            c[R::gamma_g] += L.gamma_g[col][j];
        }
        for (int l = 0; l < nd; ++l) {
            L.gamma_d[col][l] = omega[mc.loads[l].bus] * mc.loads[l].base_demand;
            c[R::gamma_d] += L.gamma_d[col][l];
        }
    };
    energy(0, prices.omega0);
    for (int k = 0; k < K; ++k) {
        const int col = k + 1;
        auto& c = L.columns[col];
        c.name = mc.scenarios[k].name;
        energy(col, prices.omega_k[k]);
        for (int l = 0; l < nd; ++l) {
            double p = prices.omega_k[k][mc.loads[l].bus] * mc.scenarios[k].load_fluctuation[l];
            L.fluctuation_by_scenario[k][l] = p;
            L.fluctuation_payment[l] += p;
            c[R::pi_d] += p;
        }
        for (int j = 0; j < ng; ++j) {
            L.gamma_up[col][j] = sol.alpha_up[k][j] * sol.r_up[j];
            L.gamma_down[col][j] = sol.beta_up[k][j] * sol.r_down[j];
            c[R::gamma_up] += L.gamma_up[col][j];
            c[R::gamma_down] += L.gamma_down[col][j];
        }
    }
    return L;
}

ExPost settle_ex_post(const ClearingSolution& sol, const MarketCase& mc, int realized) {
    if (realized < -1 || realized >= mc.n_scenarios())
        throw UnknownScenario("no scenario with index " + std::to_string(realized));
    ExPost e;
    e.scenario = realized;
    e.phi_up.assign(mc.n_gens(), 0.0);
    e.phi_down.assign(mc.n_gens(), 0.0);
    e.phi_shed.assign(mc.n_loads(), 0.0);
    if (realized < 0) {
        e.name = "Base";
        return e;
    }
    const auto& s = mc.scenarios[realized];
    e.name = s.name;
    for (int j = 0; j < mc.n_gens(); ++j) {
        e.phi_up[j] = s.c_redispatch_up[j] * sol.up[realized][j];
        e.phi_down[j] = s.c_redispatch_down[j] * sol.down[realized][j];
        e.total_up += e.phi_up[j];
        e.total_down += e.phi_down[j];
    }
    for (int l = 0; l < mc.n_loads(); ++l) {
        e.phi_shed[l] = mc.loads[l].c_shed * sol.shed[realized][l];
        e.total_shed += e.phi_shed[l];
    }
    return e;
}

ExPost settle_ex_post(const ClearingSolution& sol, const MarketCase& mc, const std::string& realized) {
    if (realized == "base" || realized == "Base") return settle_ex_post(sol, mc, -1);
    for (int k = 0; k < mc.n_scenarios(); ++k)
        if (mc.scenarios[k].name == realized || std::to_string(mc.scenarios[k].id) == realized)
            return settle_ex_post(sol, mc, k);
    throw UnknownScenario("unknown scenario '" + realized + "'");
}

Rents congestion_rent(const ClearingSolution& sol, const MarketCase& mc) {
    Rents r;
    const auto& net = sol.network();
    auto rent = [&](const Eigen::VectorXd& f, const std::vector<double>& mf, const std::vector<double>& mr,
                    const std::string& tag) {
        double s = 0.0;
        for (int i = 0; i < mc.n_lines(); ++i) {
            s += f[i] * (mf[i] + mr[i]);
            if (mr[i] > 1e-7) {
                r.reverse_binding = true;
                r.reverse_lines.push_back(tag + ":L" + std::to_string(mc.lines[i].id));
            }
        }
        return s;
    };
    r.base = rent(net.base.capacity, sol.mu_fwd, sol.mu_rev, "base");
    for (int k = 0; k < mc.n_scenarios(); ++k)
        r.scenario.push_back(rent(net.scenarios[k].capacity, sol.mu_fwd_k[k], sol.mu_rev_k[k], mc.scenarios[k].name));
    return r;
}

SettlementLedger settle(const ClearingSolution& sol, const PriceSet& prices, const MarketCase& mc) {
    using R = LedgerRow;
    auto L = settle_ex_ante(sol, prices, mc);
    const int K = mc.n_scenarios();
    auto rents = congestion_rent(sol, mc);
    L.columns[0][R::delta] = rents.base;
    L.phi_up.resize(K);
    L.phi_down.resize(K);
    L.phi_shed.resize(K);
    for (int k = 0; k < K; ++k) {
        auto& c = L.columns[k + 1];
        auto e = settle_ex_post(sol, mc, k);
        const double eps = mc.scenarios[k].probability;
        c[R::phi_up] = eps * e.total_up;
        c[R::phi_down] = eps * e.total_down;
        c[R::phi_d] = eps * e.total_shed;
        c[R::delta] = rents.scenario[k];
        L.phi_up[k] = std::move(e.phi_up);
        L.phi_down[k] = std::move(e.phi_down);
        L.phi_shed[k] = std::move(e.phi_shed);
    }
    L.total.name = "Total";
    for (const auto& c : L.columns)
        for (int r = 0; r < kLedgerRows; ++r) L.total.v[r] += c.v[r];
    return L;
}

Adequacy revenue_adequacy(const SettlementLedger& ledger, double tolerance) {
    Adequacy a;
    a.pass = true;
    auto one = [&](const LedgerColumn& c) {
        const double res = c.residual();
        const double rel = std::abs(res) / (1.0 + c.gross());
        a.column.push_back(c.name);
        a.residual.push_back(res);
        a.relative.push_back(rel);
        a.worst_relative = std::max(a.worst_relative, rel);
        if (!(rel < tolerance)) a.pass = false;
    };
    for (const auto& c : ledger.columns) one(c);
    one(ledger.total);
    return a;
}

std::string ledger_csv(const SettlementLedger& L) {
    std::string out = "row";
    for (const auto& c : L.columns) out += "," + c.name;
    out += ",Total\n";
    for (int r = 0; r < kLedgerRows; ++r) {
        out += row_label(static_cast<LedgerRow>(r));
        for (const auto& c : L.columns) out += fmt::format(",{:.17g}", c.v[r]);
        out += fmt::format(",{:.17g}\n", L.total.v[r]);
    }
    return out;
}

std::string ledger_markdown(const SettlementLedger& L, int decimals) {
    std::string out = "| Item |";
    for (const auto& c : L.columns) out += " " + c.name + " |";
    out += " Total |\n|---|";
    for (std::size_t i = 0; i <= L.columns.size(); ++i) out += "---:|";
    out += "\n";
    for (int r = 0; r < kLedgerRows; ++r) {
        out += std::string("| ") + row_label(static_cast<LedgerRow>(r)) + " |";
        for (const auto& c : L.columns) out += fmt::format(" {:.{}f} |", c.v[r], decimals);
        out += fmt::format(" {:.{}f} |\n", L.total.v[r], decimals);
    }
    return out;
}

LedgerTable parse_ledger_csv(const std::string& text) {
    LedgerTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        f.push_back(cur);
        return f;
    };
    if (!std::getline(in, line)) throw ParseError("empty ledger CSV", 1, 1);
    auto head = split(line);
    t.columns.assign(head.begin() + 1, head.end());
    int ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != head.size()) throw ParseError("ledger CSV row has wrong field count", ln, 1);
        t.rows.push_back(f[0]);
        std::vector<double> vals;
        for (std::size_t i = 1; i < f.size(); ++i) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(f[i], &used));
                if (used != f[i].size()) throw std::invalid_argument(f[i]);
            } catch (const std::exception&) {
                throw ParseError("bad number '" + f[i] + "' in ledger CSV", ln, int(i) + 1);
            }
        }
        t.values.push_back(std::move(vals));
    }
    return t;
}

}  // namespace reserveflow
