#include "reserveflow/model.hpp"

#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

namespace reserveflow {

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& e : errors) os << "error [" << e.code << "] " << e.message << "\n";
    for (const auto& w : warnings) os << "warning [" << w.code << "] " << w.message << "\n";
    return os.str();
}

std::vector<int> circuits_in_service(const MarketCase& mc, int k) {
    std::vector<int> left(mc.lines.size());
    for (std::size_t i = 0; i < mc.lines.size(); ++i) left[i] = mc.lines[i].parallel_count;
    if (k >= 0) {
        for (const auto& o : mc.scenarios[k].outages) {
            if (o.line >= 0 && o.line < mc.n_lines()) left[o.line] = std::max(0, left[o.line] - o.circuits);
        }
    }
    return left;
}

std::vector<int> islanded_buses(const MarketCase& mc, int k) {
    const int nb = mc.n_buses();
    if (nb == 0 || mc.slack_bus < 0 || mc.slack_bus >= nb) return {};
    auto left = circuits_in_service(mc, k);
    std::vector<std::vector<int>> adj(nb);
    for (std::size_t i = 0; i < mc.lines.size(); ++i) {
        const auto& ln = mc.lines[i];
        if (left[i] <= 0) continue;
        if (ln.from_bus < 0 || ln.from_bus >= nb || ln.to_bus < 0 || ln.to_bus >= nb) continue;
        adj[ln.from_bus].push_back(ln.to_bus);
        adj[ln.to_bus].push_back(ln.from_bus);
    }
    std::vector<char> seen(nb, 0);
    std::queue<int> q;
    q.push(mc.slack_bus);
    seen[mc.slack_bus] = 1;
    while (!q.empty()) {
        int b = q.front();
        q.pop();
        for (int n : adj[b])
            if (!seen[n]) { seen[n] = 1; q.push(n); }
    }
    std::vector<int> out;
    for (int b = 0; b < nb; ++b)
        if (!seen[b]) out.push_back(b);
    return out;
}

namespace {

struct Collector {
    ValidationReport rep;
    void error(std::string code, std::string msg) { rep.errors.push_back({std::move(code), std::move(msg)}); }
    void warn(std::string code, std::string msg) { rep.warnings.push_back({std::move(code), std::move(msg)}); }
};

bool finite(double v) { return std::isfinite(v); }

std::string join_ids(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

}  // namespace

ValidationReport validate_case(const MarketCase& mc) {
    Collector c;
    const int nb = mc.n_buses();
    auto bus_ok = [nb](int b) { return b >= 0 && b < nb; };

    for (int i = 0; i < nb; ++i)
        if (mc.buses[i].id != i)
            c.error("bus-ids", "bus ids must be contiguous 0..N-1; position " + std::to_string(i) +
                                   " holds id " + std::to_string(mc.buses[i].id));
    if (nb == 0) c.error("no-buses", "case has no buses");
    if (!bus_ok(mc.slack_bus)) c.error("dangling-bus", "dangling bus reference: slack bus " + std::to_string(mc.slack_bus));

    for (const auto& ln : mc.lines) {
        std::string who = "line " + std::to_string(ln.id);
        if (!bus_ok(ln.from_bus) || !bus_ok(ln.to_bus))
            c.error("dangling-bus", "dangling bus reference: " + who);
        else if (ln.from_bus == ln.to_bus)
            c.error("line-self-loop", who + " connects a bus to itself");
        if (!finite(ln.reactance) || ln.reactance <= 0) c.error("line-reactance", who + " reactance must be finite and positive");
        if (!finite(ln.capacity) || ln.capacity <= 0) c.error("line-capacity", who + " capacity must be finite and positive");
        if (ln.parallel_count < 1) c.error("line-circuits", who + " parallel_count must be at least 1");
    }

    if (mc.generators.empty()) c.error("no-generators", "case has no generators");
    double max_bid = -INFINITY;
    for (const auto& g : mc.generators) {
        std::string who = "generator " + g.name;
        if (!bus_ok(g.bus)) c.error("dangling-bus", "dangling bus reference: " + who);
        if (!finite(g.g_min) || !finite(g.g_max) || g.g_min > g.g_max) c.error("gen-limits", who + " needs finite g_min <= g_max");
        if (!finite(g.ru_max) || g.ru_max < 0) c.error("gen-reserve", who + " ru_max must be >= 0");
        if (!finite(g.rd_max) || g.rd_max < 0) c.error("gen-reserve", who + " rd_max must be >= 0");
        if (!finite(g.c_energy) || !finite(g.c_ru) || !finite(g.c_rd)) c.error("gen-prices", who + " has a non-finite bid");
        max_bid = std::max(max_bid, g.c_energy);
    }

    for (const auto& l : mc.loads) {
        std::string who = "load " + l.name;
        if (!bus_ok(l.bus)) c.error("dangling-bus", "dangling bus reference: " + who);
        if (!finite(l.base_demand) || l.base_demand < 0) c.error("load-demand", who + " base_demand must be >= 0");
        if (!finite(l.c_shed) || l.c_shed < 0) c.error("load-shed-price", who + " c_shed must be >= 0");
        else if (!mc.generators.empty() && l.c_shed <= max_bid)
            c.warn("cheap-shedding", who + " shedding price does not exceed every energy bid");
    }

    double total_prob = 0.0;
    for (std::size_t k = 0; k < mc.scenarios.size(); ++k) {
        const auto& s = mc.scenarios[k];
        std::string who = "scenario " + (s.name.empty() ? std::to_string(k) : s.name);
        if (!finite(s.probability) || s.probability <= 0 || s.probability > 1)
            c.error("scenario-probability", who + " probability must lie in (0,1]");
        else
            total_prob += s.probability;
        if (!finite(s.exceed_rate) || s.exceed_rate < 1) c.error("exceed-rate", who + " exceed_rate must be >= 1");
        if (s.load_fluctuation.size() != mc.loads.size())
            c.error("fluctuation-size", who + " load_fluctuation must have one entry per load");
        else
            for (std::size_t l = 0; l < mc.loads.size(); ++l) {
                if (!finite(s.load_fluctuation[l]))
                    c.error("fluctuation-value", who + " has a non-finite fluctuation");
                else if (mc.loads[l].base_demand + s.load_fluctuation[l] < 0)
                    c.error("negative-demand", who + " drives load " + mc.loads[l].name + " negative");
            }
        if (s.c_redispatch_up.size() != mc.generators.size() || s.c_redispatch_down.size() != mc.generators.size())
            c.error("redispatch-size", who + " re-dispatch prices need one entry per generator");
        else
            for (std::size_t j = 0; j < mc.generators.size(); ++j)
                if (!finite(s.c_redispatch_up[j]) || !finite(s.c_redispatch_down[j]))
                    c.error("redispatch-value", who + " has a non-finite re-dispatch price");
        for (const auto& o : s.outages) {
            if (o.line < 0 || o.line >= mc.n_lines())
                c.error("dangling-line", "dangling line reference: " + who + " outage of line " + std::to_string(o.line));
            else if (o.circuits < 1 || o.circuits > mc.lines[o.line].parallel_count)
                c.error("outage-circuits", who + " outage circuit count out of range on line " + std::to_string(o.line));
        }
    }
    if (total_prob > 1.0 + 1e-12) c.error("probability-sum", "scenario probabilities exceed 1");
    else if (total_prob > 0.99) c.warn("base-weight", "scenario probabilities leave a near-zero base-case weight");

    // Topology checks only make sense once references resolve.
    if (c.rep.errors.empty()) {
        auto isl = islanded_buses(mc, -1);
        if (!isl.empty()) c.error("islanded", "base network is disconnected; islanded buses " + join_ids(isl));
        for (int k = 0; k < mc.n_scenarios(); ++k) {
            isl = islanded_buses(mc, k);
            if (!isl.empty())
                c.error("islanded", "scenario " + mc.scenarios[k].name + " islands buses " + join_ids(isl));
        }
    }
    return c.rep;
}

RedispatchGroups uniform_redispatch_groups(const MarketCase& mc) {
    RedispatchGroups out;
    using Key = std::tuple<int, std::vector<double>, std::vector<double>>;
    std::map<Key, int> index;
    std::map<int, int> groups_per_bus;
    for (int j = 0; j < mc.n_gens(); ++j) {
        Key key{mc.generators[j].bus, {}, {}};
        for (const auto& s : mc.scenarios) {
            std::get<1>(key).push_back(s.c_redispatch_up.at(j));
            std::get<2>(key).push_back(s.c_redispatch_down.at(j));
        }
        auto [it, fresh] = index.try_emplace(key, static_cast<int>(out.groups.size()));
        if (fresh) {
            out.groups.emplace_back();
            ++groups_per_bus[mc.generators[j].bus];
        }
        out.groups[it->second].push_back(j);
    }
    for (auto [bus, n] : groups_per_bus)
        if (n > 1) out.violating_buses.push_back(bus);
    out.assumption_holds = out.violating_buses.empty();
    return out;
}

}  // namespace reserveflow
