#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/ptdf.hpp"

namespace reserveflow {

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("RESERVEFLOW_DATA")) return env;
    return RESERVEFLOW_DATA_DIR;
}

// ---- two-bus -------------------------------------------------------------

MarketCase twobus_case(const TwoBusParams& p) {
    MarketCase mc;
    mc.name = "twobus";
    mc.buses = {{0, "bus1"}, {1, "bus2"}};
    mc.slack_bus = 0;
    mc.lines = {{1, 0, 1, 0.1, p.line_capacity, 2}};
    //                   id name  bus gmin gmax ru rd  Cg  CU   CD
    mc.generators = {{1, "G1", 0, 0, 16, 4, 4, 8, 2, 2},
                     {2, "G2", 1, 0, 18, 4, 4, 15, 2, 2},
                     {3, "G3", 1, 0, 12, 4, 4, 20, 2.5, 2.5}};
    mc.loads = {{1, "d1", 0, 6, p.c_shed}, {2, "d2", 1, 15, p.c_shed}, {3, "d3", 1, 4, p.c_shed}};

    struct Row {
        const char* name;
        double prob;
        bool outage;
        std::vector<double> pi;
        double price_bus1, price_bus2;
    };
    const std::vector<double> basic{0, 0, 0}, sit1{2, 7, -1}, sit2{3, 2, -3};
    const Row rows[] = {{"S1", 0.06, true, basic, 19.1, 26.3},
                        {"S2", 0.02, true, sit1, 19.7, 33.8},
                        {"S3", 0.02, true, sit2, 19.4, 32.7},
                        {"S4", 0.18, false, sit1, 19.4, 33.5},
                        {"S5", 0.18, false, sit2, 19.1, 27.5}};
    int id = 1;
    for (const auto& r : rows) {
        Scenario s;
        s.id = id++;
        s.name = r.name;
        s.probability = r.prob;
        if (r.outage) s.outages.push_back({0, 1});
        s.load_fluctuation = r.pi;
        s.exceed_rate = p.exceed_rate;
        for (const auto& g : mc.generators) {
            double c = g.bus == 0 ? r.price_bus1 : r.price_bus2;
            s.c_redispatch_up.push_back(c);
            s.c_redispatch_down.push_back(c);
        }
        mc.scenarios.push_back(std::move(s));
    }
    return mc;
}

CalibrationRecord load_calibration(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingData("calibration file not found: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what(), 0, 0);
    }
    try {
        CalibrationRecord r;
        r.params.line_capacity = j.at("line_capacity").get<double>();
        r.params.exceed_rate = j.at("exceed_rate").get<double>();
        r.params.c_shed = j.at("c_shed").get<double>();
        r.quantity_residual = j.at("quantity_residual").get<double>();
        r.price_residual = j.at("price_residual").get<double>();
        r.passed = j.at("status").get<std::string>() == "PASS";
        r.note = j.value("note", "");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void save_calibration(const CalibrationRecord& r, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["line_capacity"] = r.params.line_capacity;
    j["exceed_rate"] = r.params.exceed_rate;
    j["c_shed"] = r.params.c_shed;
    j["placement"] = "G1, d1 at bus 1; G2, G3, d2, d3 at bus 2";
    j["quantity_residual"] = r.quantity_residual;
    j["price_residual"] = r.price_residual;
    j["status"] = r.passed ? "PASS" : "WARN";
    if (!r.note.empty()) j["note"] = r.note;
    write_file(path, j.dump(2) + "\n");
}

MarketCase fixture_twobus() {
    return twobus_case(load_calibration(data_dir() / "twobus_calibration.json").params);
}

// ---- IEEE 118 ------------------------------------------------------------

MarketCase ieee118_case(const Ieee118Options& opt) {
    const auto file = opt.network_file.empty() ? data_dir() / "case118.m" : opt.network_file;
    const MatpowerData raw = read_matpower(file);

    MarketCase mc;
    mc.name = "ieee118";
    std::map<int, int> bus_at;
    for (const auto& r : raw.bus) {
        const int id = static_cast<int>(r.at(0));
        bus_at[id] = mc.n_buses();
        mc.buses.push_back({bus_at[id], std::to_string(id)});  // the published number survives as the name
        if (static_cast<int>(r.at(1)) == 3) mc.slack_bus = bus_at[id];
    }
    for (std::size_t i = 0; i < raw.branch.size(); ++i) {
        const auto& r = raw.branch[i];
        if (r.size() > 10 && r[10] == 0) continue;  // out of service in the source data
        mc.lines.push_back({static_cast<int>(i + 1), bus_at.at(int(r.at(0))), bus_at.at(int(r.at(1))), r.at(3), 0.0, 1});
    }
    for (std::size_t i = 0; i < raw.gen.size(); ++i) {
        const auto& r = raw.gen[i];
        const auto& c = raw.gencost.at(i);
        // polynomial cost rows: model startup shutdown n c(n-1) ... c0
        const int n = static_cast<int>(c.at(3));
        const double c2 = n >= 3 ? c.at(4) : 0.0;
        const double c1 = n >= 3 ? c.at(5) : (n == 2 ? c.at(4) : 0.0);
        const double pmax = r.at(8), pmin = r.at(9);
        Generator g;
        g.id = static_cast<int>(i + 1);
        g.name = "G" + std::to_string(i + 1);
        g.bus = bus_at.at(int(r.at(0)));
        g.g_min = pmin;
        g.g_max = pmax;
        // marginal cost of the quadratic at half of Pmax
        g.c_energy = c1 + c2 * pmax;
        g.ru_max = g.rd_max = opt.reserve_share * pmax;
        g.c_ru = g.c_rd = opt.reserve_cost_share * g.c_energy;
        mc.generators.push_back(g);
    }
    int split_from = -1;
    for (const auto& r : raw.bus) {
        const double pd = r.at(2);
        if (pd <= 0) continue;
        const int id = static_cast<int>(r.at(0));
        Load d{id, "d" + std::to_string(id), bus_at.at(id), pd, opt.c_shed};
        if (id == 59) {
            d.base_demand = pd / 2;
            split_from = mc.n_loads();
        }
        mc.loads.push_back(d);
    }
    if (split_from < 0) throw SchemaError("network file has no load at bus 59");
    {
        Load extra = mc.loads[split_from];
        extra.id = 119;
        extra.name = "d119";
        mc.loads.push_back(extra);
    }
    const int i119 = mc.n_loads() - 1;

    // Line ratings: the published file has none that bind, so rate each line from the
    // flow of a merit-order dispatch on a copper plate, floored and rounded up.
    {
        std::vector<int> order(mc.n_gens());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return mc.generators[a].c_energy < mc.generators[b].c_energy; });
        double rest = 0.0;
        for (const auto& d : mc.loads) rest += d.base_demand;
        std::vector<double> g(mc.n_gens(), 0.0), d(mc.n_loads());
        for (int j : order) {
            g[j] = std::min(mc.generators[j].g_max, rest);
            rest -= g[j];
        }
        for (int l = 0; l < mc.n_loads(); ++l) d[l] = mc.loads[l].base_demand;
        Eigen::VectorXd flow = base_shift_factors(mc).matrix * bus_injection(mc, g, d);
        for (int i = 0; i < mc.n_lines(); ++i)
            mc.lines[i].capacity = std::max(opt.rating_floor,
                                            std::ceil(opt.rating_factor * std::abs(flow[i]) / opt.rating_step) *
                                                opt.rating_step);
    }

    auto level = [&](int l) {
        auto it = opt.level_override.find(mc.loads[l].name);
        return it == opt.level_override.end() ? opt.fluctuation_level : it->second;
    };
    // Situation I: d119 up, every other load down; situation II the reverse.
    auto situation = [&](int which) {
        std::vector<double> pi(mc.n_loads());
        for (int l = 0; l < mc.n_loads(); ++l) {
            double sign = (l == i119) == (which == 1) ? 1.0 : -1.0;
            pi[l] = sign * level(l) * mc.loads[l].base_demand;
        }
        return pi;
    };
    const std::vector<double> none(mc.n_loads(), 0.0);
    const double ps = opt.situation_probability, pbasic = 1.0 - 2 * ps;
    const double pout = opt.outage_probability;
    const double pnone = 1.0 - pout * double(opt.outage_lines.size());

    auto add = [&](std::string name, double prob, std::vector<LineOutage> outs, std::vector<double> pi) {
        Scenario s;
        s.id = mc.n_scenarios() + 1;
        s.name = std::move(name);
        s.probability = prob;
        s.outages = std::move(outs);
        s.load_fluctuation = std::move(pi);
        s.exceed_rate = opt.exceed_rate;
        for (const auto& g : mc.generators) {
            s.c_redispatch_up.push_back(g.c_energy + opt.redispatch_adder);
            s.c_redispatch_down.push_back(g.c_energy - opt.redispatch_adder);
        }
        mc.scenarios.push_back(std::move(s));
    };
    for (int line_id : opt.outage_lines) {
        auto it = std::find_if(mc.lines.begin(), mc.lines.end(), [&](const Line& l) { return l.id == line_id; });
        if (it == mc.lines.end()) throw SchemaError("outage line " + std::to_string(line_id) + " not in network");
        const int li = static_cast<int>(it - mc.lines.begin());
        const std::string tag = "out" + std::to_string(line_id);
        add(tag, pout * pbasic, {{li, 1}}, none);
        add(tag + "+I", pout * ps, {{li, 1}}, situation(1));
        add(tag + "+II", pout * ps, {{li, 1}}, situation(2));
    }
    add("I", pnone * ps, {}, situation(1));
    add("II", pnone * ps, {}, situation(2));
    return mc;
}

MarketCase fixture_ieee118() { return ieee118_case({}); }

}  // namespace reserveflow
