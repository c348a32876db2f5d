#include "reserveflow/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "reserveflow/errors.hpp"
#include "reserveflow/pricing.hpp"
#include "reserveflow/settlement.hpp"

namespace reserveflow {

std::vector<double> SweepRange::values() const {
    std::vector<double> v;
    if (count == 1) return {from};
    for (int i = 0; i < count; ++i) v.push_back(from + (to - from) * double(i) / double(count - 1));
    return v;
}

SweepRange parse_range(const std::string& text) {
    auto bad = [&] { return std::invalid_argument("range must look like a:b:n, got '" + text + "'"); };
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw bad();
    SweepRange r;
    try {
        std::size_t u1, u2, u3;
        const std::string a = text.substr(0, c1), b = text.substr(c1 + 1, c2 - c1 - 1), n = text.substr(c2 + 1);
        r.from = std::stod(a, &u1);
        r.to = std::stod(b, &u2);
        r.count = std::stoi(n, &u3);
        if (u1 != a.size() || u2 != b.size() || u3 != n.size()) throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    if (r.count < 1) throw bad();
    return r;
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    // names may themselves contain dots, so the first and last dot split the path
    const auto first = path.find('.'), last = path.rfind('.');
    if (first == std::string::npos) return {path};
    parts.push_back(path.substr(0, first));
    if (last != first) parts.push_back(path.substr(first + 1, last - first - 1));
    parts.push_back(path.substr(last + 1));
    return parts;
}

template <class T, class Pred>
int find_index(const std::vector<T>& v, Pred p, const std::string& what) {
    auto it = std::find_if(v.begin(), v.end(), p);
    if (it == v.end()) throw std::invalid_argument("no " + what);
    return static_cast<int>(it - v.begin());
}

}  // namespace

MarketCase apply_parameter(const MarketCase& base, const std::string& path, double value) {
    MarketCase mc = base;
    const auto p = split_path(path);
    const auto unknown = std::invalid_argument("unknown sweep parameter '" + path + "'");
    if (p.size() == 2 && p[0] == "scenarios" && p[1] == "exceed_rate") {
        for (auto& s : mc.scenarios) s.exceed_rate = value;
        return mc;
    }
    if (p.size() != 3) throw unknown;
    const std::string& name = p[1];
    if (p[0] == "loads") {
        const int l = find_index(mc.loads, [&](const Load& d) { return d.name == name || std::to_string(d.id) == name; },
                                 "load '" + name + "'");
        if (p[2] == "base_demand") {
            mc.loads[l].base_demand = value;
        } else if (p[2] == "fluctuation_level") {
            double peak = 0.0;
            for (const auto& s : mc.scenarios) peak = std::max(peak, std::abs(s.load_fluctuation[l]));
            const double d = mc.loads[l].base_demand;
            if (peak == 0.0 || d == 0.0)
                throw std::invalid_argument("load '" + name + "' has no fluctuation pattern to rescale");
            const double scale = value * d / peak;
            for (auto& s : mc.scenarios) s.load_fluctuation[l] *= scale;
        } else {
            throw unknown;
        }
    } else if (p[0] == "lines" && p[2] == "capacity") {
        const int i = find_index(mc.lines, [&](const Line& x) { return std::to_string(x.id) == name; },
                                 "line '" + name + "'");
        mc.lines[i].capacity = value;
    } else if (p[0] == "generators" && p[2] == "c_energy") {
        const int j = find_index(mc.generators,
                                 [&](const Generator& g) { return g.name == name || std::to_string(g.id) == name; },
                                 "generator '" + name + "'");
        mc.generators[j].c_energy = value;
    } else {
        throw unknown;
    }
    return mc;
}

std::vector<SweepPoint> run_sweep(const MarketCase& mc, const std::string& path, const SweepRange& range,
                                  const SolverOptions& opt, Execution ex) {
    const auto values = range.values();
    // Build every case up front so a bad path fails before any solve.
    std::vector<MarketCase> cases;
    for (double v : values) cases.push_back(apply_parameter(mc, path, v));
    std::vector<SweepPoint> out(values.size());
    const int n = static_cast<int>(values.size());
#pragma omp parallel for schedule(dynamic) if (ex == Execution::parallel)
    for (int i = 0; i < n; ++i) {
        SweepPoint& pt = out[i];
        pt.value = values[i];
        try {
            auto sol = solve_clearing(cases[i], opt);
            auto pr = price(sol, cases[i]);
            auto led = settle_ex_ante(sol, pr, cases[i]);
            pt.objective = sol.expected_total_cost;
            pt.eta_g = pr.eta_g;
            pt.eta_d = pr.eta_d;
            pt.eta_up = pr.eta_up;
            pt.eta_down = pr.eta_down;
            pt.fluctuation_payment = led.fluctuation_payment;
            pt.solved = true;
        } catch (const Error& e) {
            pt.error = e.what();
        }
    }
    return out;
}

std::string sweep_csv(const MarketCase& mc, const std::string& path, const std::vector<SweepPoint>& points) {
    std::string out = "parameter,value,quantity,resource,amount\n";
    for (const auto& pt : points) {
        auto row = [&](const char* q, const std::string& res, double v) {
            out += fmt::format("{},{:.17g},{},{},{:.17g}\n", path, pt.value, q, res, v);
        };
        if (!pt.solved) {
            std::string msg = pt.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out += fmt::format("{},{:.17g},status,{},nan\n", path, pt.value, msg);
            continue;
        }
        row("objective", "system", pt.objective);
        for (int j = 0; j < mc.n_gens(); ++j) {
            const auto& g = mc.generators[j].name;
            row("eta_g", g, pt.eta_g[j]);
            row("eta_U", g, pt.eta_up[j]);
            row("eta_D", g, pt.eta_down[j]);
        }
        for (int l = 0; l < mc.n_loads(); ++l) {
            row("eta_d", mc.loads[l].name, pt.eta_d[l]);
            row("Pi_d", mc.loads[l].name, pt.fluctuation_payment[l]);
        }
    }
    return out;
}

}  // namespace reserveflow
