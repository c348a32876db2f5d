#include "reserveflow/reports.hpp"

#include <fmt/format.h>
#include <stdexcept>

namespace reserveflow {

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "md" || s == "markdown") return Format::md;
    throw std::invalid_argument("unknown format '" + s + "' (csv or md)");
}

namespace {

// Small table builder; CSV keeps full precision, markdown rounds for reading.
struct Table {
    std::vector<std::string> head;
    std::vector<std::vector<std::string>> rows;
    int decimals = 3;

    void add(std::string label, std::vector<double> vals, Format f) {
        std::vector<std::string> r{std::move(label)};
        for (double v : vals) r.push_back(f == Format::csv ? fmt::format("{:.17g}", v) : fmt::format("{:.{}f}", v, decimals));
        rows.push_back(std::move(r));
    }
    void add_text(std::vector<std::string> r) { rows.push_back(std::move(r)); }

    std::string render(Format f) const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            if (f == Format::csv) {
                for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
                out += "\n";
            } else {
                out += "|";
                for (const auto& c : cells) out += " " + c + " |";
                out += "\n";
            }
        };
        line(head);
        if (f == Format::md) {
            out += "|---|";
            for (std::size_t i = 1; i < head.size(); ++i) out += "---:|";
            out += "\n";
        }
        for (const auto& r : rows) line(r);
        return out;
    }
};

}  // namespace

std::string clearing_table(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& p,
                           const SettlementLedger& ledger, Format f) {
    Table gens;
    gens.head = {"generator", "bus", "g", "r_U", "r_D", "eta_g", "eta_U", "eta_D"};
    for (int j = 0; j < mc.n_gens(); ++j) {
        Table t;
        t.add(mc.generators[j].name, {sol.g[j], sol.r_up[j], sol.r_down[j], p.eta_g[j], p.eta_up[j], p.eta_down[j]}, f);
        auto row = t.rows.front();
        row.insert(row.begin() + 1, mc.buses[mc.generators[j].bus].name);
        gens.add_text(row);
    }
    Table loads;
    loads.head = {"load", "bus", "d", "eta_d", "Pi_d"};
    for (int l = 0; l < mc.n_loads(); ++l) {
        Table t;
        t.add(mc.loads[l].name, {mc.loads[l].base_demand, p.eta_d[l], ledger.fluctuation_payment[l]}, f);
        auto row = t.rows.front();
        row.insert(row.begin() + 1, mc.buses[mc.loads[l].bus].name);
        loads.add_text(row);
    }
    const std::string sep = "\n";
    std::string obj = f == Format::csv ? fmt::format("expected_total_cost,{:.17g}\n", sol.expected_total_cost)
                                       : fmt::format("Expected total cost: {:.4f}\n", sol.expected_total_cost);
    return gens.render(f) + sep + loads.render(f) + sep + obj;
}

std::string price_table(const MarketCase& mc, const PriceSet& p, Format f) {
    Table bus;
    bus.head = {"bus", "omega_0"};
    for (const auto& s : mc.scenarios) bus.head.push_back("omega_" + s.name);
    for (int b = 0; b < mc.n_buses(); ++b) {
        std::vector<double> v{p.omega0[b]};
        for (int k = 0; k < mc.n_scenarios(); ++k) v.push_back(p.omega_k[k][b]);
        bus.add(mc.buses[b].name, v, f);
    }
    Table res;
    res.head = {"resource", "eta", "eta_U", "eta_D"};
    for (int j = 0; j < mc.n_gens(); ++j)
        res.add(mc.generators[j].name, {p.eta_g[j], p.eta_up[j], p.eta_down[j]}, f);
    for (int l = 0; l < mc.n_loads(); ++l) {
        Table t;
        t.add(mc.loads[l].name, {p.eta_d[l]}, f);
        auto row = t.rows.front();
        row.insert(row.end(), {"", ""});
        res.add_text(row);
    }
    return bus.render(f) + "\n" + res.render(f);
}

std::string ledger_table(const SettlementLedger& ledger, Format f) {
    return f == Format::csv ? ledger_csv(ledger) : ledger_markdown(ledger, 2);
}

std::string ex_post_table(const MarketCase& mc, const ExPost& e, Format f) {
    Table t;
    t.head = {"resource", "Phi_U", "Phi_D", "Phi_shed"};
    for (int j = 0; j < mc.n_gens(); ++j) t.add(mc.generators[j].name, {e.phi_up[j], e.phi_down[j], 0.0}, f);
    for (int l = 0; l < mc.n_loads(); ++l) t.add(mc.loads[l].name, {0.0, 0.0, e.phi_shed[l]}, f);
    t.add("total", {e.total_up, e.total_down, e.total_shed}, f);
    std::string title = f == Format::csv ? "realized," + e.name + "\n" : "Realized: " + e.name + "\n\n";
    return title + t.render(f);
}

}  // namespace reserveflow
