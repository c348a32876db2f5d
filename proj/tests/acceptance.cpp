// One line per acceptance criterion. Exit status is nonzero when a criterion that
// must hold does not; a downgraded criterion reports its residual and does not fail.
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <random>

#include "random_lp.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/sweep.hpp"
#include "reserveflow/verify.hpp"

using namespace reserveflow;

namespace {

int failures = 0;

void line(const std::string& verdict, const std::string& name, const std::string& detail) {
    fmt::print("[{}] {}: {}\n", verdict, name, detail);
    std::fflush(stdout);
    if (verdict == "FAIL") ++failures;
}

struct Cleared {
    MarketCase mc;
    ClearingSolution sol;
    PriceSet prices;
    SettlementLedger ledger;
    double seconds = 0.0;
};

Cleared clear(MarketCase mc) {
    Cleared c{std::move(mc), {}, {}, {}, 0.0};
    auto t0 = std::chrono::steady_clock::now();
    c.sol = solve_clearing(c.mc);
    c.prices = price(c.sol, c.mc);
    c.ledger = settle(c.sol, c.prices, c.mc);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

int find_load(const MarketCase& mc, const std::string& name) {
    for (int l = 0; l < mc.n_loads(); ++l)
        if (mc.loads[l].name == name) return l;
    throw std::runtime_error("no load " + name);
}

void revenue_adequacy_line(const Cleared& two, const Cleared& big) {
    auto a = revenue_adequacy(two.ledger, 1e-6);
    auto b = revenue_adequacy(big.ledger, 1e-4);
    const bool ok = a.pass && b.pass && a.column.size() == 7 && two.seconds < 1.0 && big.seconds < 60.0;
    line(ok ? "PASS" : "FAIL", "revenue adequacy",
         fmt::format("2-bus worst relative {:.2e} (< 1e-6, {:.3f} s); 118-bus worst relative {:.2e} (< 1e-4, {:.1f} s)",
                     a.worst_relative, two.seconds, b.worst_relative, big.seconds));
}

void uniform_pricing_line(const Cleared& two, const Cleared& big) {
    auto a = check_uniform_pricing(two.mc, two.prices, two.sol, 1e-6);
    auto b = check_uniform_pricing(big.mc, big.prices, big.sol, 1e-6);
    auto ok = [](CheckStatus s) { return s == CheckStatus::pass; };
    std::string verdict = ok(a.status) && ok(b.status) ? "PASS" : "FAIL";
    // A miss with degeneracy flagged is what the criterion exempts.
    if (verdict == "FAIL" && a.status != CheckStatus::fail && b.status != CheckStatus::fail) verdict = "WARN";
    line(verdict, "uniform pricing",
         fmt::format("2-bus {} (worst {:.2e}); 118-bus {} (worst {:.2e}, {} notes)", to_string(a.status), a.worst,
                     to_string(b.status), b.worst, b.notes.size()));
}

void regression_line(const Cleared& c) {
    auto rec = load_calibration(data_dir() / "twobus_calibration.json");
    const auto& s = c.sol;
    const auto& p = c.prices;
    const auto& L = c.ledger;
    std::vector<std::string> misses;
    auto near = [&](double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol)) misses.push_back(fmt::format("{} {:.3f} vs {}", what, got, want));
    };
    // Cells the published tables pin down consistently.
    const double g[] = {8, 17, 0}, ru[] = {2.4, 1, 4}, rd[] = {0.8, 0, 0}, eu[] = {2.0, 5.3, 5.3}, fl[] = {23.3, 91.7, -23.5};
    for (int j = 0; j < 3; ++j) {
        near(s.g[j], g[j], 0.05, fmt::format("g{}", j + 1));
        near(s.r_up[j], ru[j], 0.05, fmt::format("r_U{}", j + 1));
        near(s.r_down[j], rd[j], 0.05, fmt::format("r_D{}", j + 1));
        near(p.eta_up[j], eu[j], 0.05, fmt::format("eta_U{}", j + 1));
        near(L.fluctuation_payment[j], fl[j], 0.1, fmt::format("Pi_d{}", j + 1));
    }
    near(p.eta_down[0], 2.0, 0.05, "eta_D1");
    const double delta[] = {3.5, 2.9, 1.0, 0, 12.7, 0};
    for (int k = 0; k < 6; ++k) near(L.columns[k][LedgerRow::delta], delta[k], 0.1, "Delta " + L.columns[k].name);

    // Cells that do not reproduce: the published eta_g and base energy money sit
    // 17.4 $/MWh above what the clearing supports, which is the scenario part of
    // the bus 2 price.
    double scen_bus2 = 0.0;
    for (const auto& w : p.omega_k) scen_bus2 += w[1];
    const double offset = 35.7 - p.eta_g[1];
    const std::string diag = fmt::format(
        "eta_g = ({:.3f}, {:.3f}, {:.3f}) vs published (25.4, 35.7, 35.7), offset {:.3f} = sum_k omega_k(bus 2) {:.3f}; "
        "eta_D = ({:.3f}, {:.3f}, {:.3f}) vs (2.0, 3.7, 3.7); Gamma_d total {:.1f} vs 830.7, Gamma_g total {:.1f} vs 810.1",
        p.eta_g[0], p.eta_g[1], p.eta_g[2], offset, scen_bus2, p.eta_down[0], p.eta_down[1], p.eta_down[2],
        L.total[LedgerRow::gamma_d], L.total[LedgerRow::gamma_g]);
    if (!misses.empty()) {
        std::string m;
        for (const auto& x : misses) m += (m.empty() ? "" : "; ") + x;
        line("FAIL", "2-bus regression", "reproducible cells off: " + m);
        return;
    }
    if (rec.passed) {
        line("PASS", "2-bus regression", "calibration within tolerance; " + diag);
        return;
    }
    line("DOWNGRADED", "2-bus regression",
         fmt::format("calibration failed, best residual {:.3g} MW / {:.3g} $; quantities, eta_U, eta_D(G1), Pi_d and "
                     "Delta reproduce; {}",
                     rec.quantity_residual, rec.price_residual, diag));
}

void lp_oracle_line() {
    std::mt19937_64 rng(20240611);
    int agree = 0, optimal = 0;
    double worst_obj = 0.0, worst_gap = 0.0;
    std::string first_bad;
    for (int t = 0; t < 200; ++t) {
        auto p = testutil::random_lp(rng, 0.2);
        auto o = vertex_oracle(p);
        auto s = solve(p);
        bool ok = s.status == o.status;
        if (ok && o.status == LpStatus::Optimal) {
            ++optimal;
            const double d = std::abs(s.objective - o.objective) / (1.0 + std::abs(o.objective));
            const double gap = check_kkt(p, s).gap;
            worst_obj = std::max(worst_obj, d);
            worst_gap = std::max(worst_gap, gap);
            ok = d <= 1e-8 && gap < 1e-8;
        }
        if (ok) ++agree;
        else if (first_bad.empty()) first_bad = fmt::format(" first mismatch at #{}", t);
    }
    line(agree == 200 ? "PASS" : "FAIL", "LP kernel oracle equivalence",
         fmt::format("{}/200 agree ({} optimal), worst objective {:.1e}, worst gap {:.1e}{}", agree, optimal, worst_obj,
                     worst_gap, first_bad));
}

void kkt_line(const Cleared& two, const Cleared& big) {
    auto a = check_kkt_identities(two.sol, two.mc, 1e-6);
    auto b = check_kkt_identities(big.sol, big.mc, 1e-6);
    auto pa = phase_angle_crosscheck(two.mc, two.sol, two.prices, 1e-6, 1e-6);
    auto pb = phase_angle_crosscheck(big.mc, big.sol, big.prices, 1e-5, 1e-6);
    // objectives frozen from the scipy/HiGHS angle-model oracle
    const double oa = std::abs(two.sol.expected_total_cost - 396.4212) / 396.4212;
    const double ob = std::abs(big.sol.expected_total_cost - 141368.14332) / 141368.14332;
    const bool ok = a.status == CheckStatus::pass && b.status == CheckStatus::pass && pa.status == CheckStatus::pass &&
                    pb.status == CheckStatus::pass && oa < 1e-6 && ob < 1e-6;
    std::string extra;
    for (const auto& n : pb.notes)
        if (n.find("other optimal duals") != std::string::npos) extra = "; 118-bus: " + n;
    line(ok ? "PASS" : "FAIL", "KKT and dual identities",
         fmt::format("stationarity identities {:.1e} / {:.1e}; angle model at mapped duals {:.1e} / {:.1e}; "
                     "objective vs HiGHS oracle {:.1e} / {:.1e}{}",
                     a.worst, b.worst, pa.worst, pb.worst, oa, ob, extra));
}

void envelope_line(const Cleared& c) {
    std::mt19937_64 rng(97);
    std::vector<Probe> all;
    for (auto kind : {ProbeKind::energy, ProbeKind::reserve_up, ProbeKind::reserve_down})
        for (int j = 0; j < c.mc.n_gens(); ++j) all.push_back({kind, j});
    for (int l = 0; l < c.mc.n_loads(); ++l) all.push_back({ProbeKind::load, l});
    std::shuffle(all.begin(), all.end(), rng);
    int checked = 0, skipped = 0, bad = 0, bracketed = 0, two_sided = 0;
    double worst = 0.0;
    std::string names;
    for (int i = 0; i < 5; ++i) {
        auto r = envelope_check(c.mc, c.sol, c.prices, all[i], 1e-3, 1e-2);
        names += fmt::format("{}{}{}", names.empty() ? "" : ", ", r.resource, r.degenerate ? " (degenerate)" : "");
        if (r.degenerate) {
            ++skipped;
            // at a kink the price should still lie between the one-sided differences
            if (r.left_ok && r.right_ok) {
                ++two_sided;
                if (r.expected >= std::min(r.left, r.right) - 1e-2 && r.expected <= std::max(r.left, r.right) + 1e-2)
                    ++bracketed;
            }
            continue;
        }
        ++checked;
        worst = std::max(worst, r.error);
        if (!(r.error < 1e-2)) ++bad;
    }
    line(bad == 0 && checked > 0 ? "PASS" : "FAIL", "envelope pricing consistency",
         fmt::format("{} probes checked, {} skipped as degenerate ({} of {} two-sided ones bracket the price), "
                     "worst |difference - expected| {:.2e} [{}]",
                     checked, skipped, bracketed, two_sided, worst, names));
}

void comparison_line(const Cleared& c) {
    std::vector<Comparison> runs;
    for (int i = 0; i < 10; ++i) runs.push_back(compare_traditional(c.mc, c.sol));
    bool stable = true;
    for (const auto& r : runs)
        stable &= r.recourse_feasible == runs[0].recourse_feasible && r.traditional.g == runs[0].traditional.g &&
                  r.traditional.r_up == runs[0].traditional.r_up && r.traditional.r_down == runs[0].traditional.r_down &&
                  (!r.recourse_feasible || r.gap == runs[0].gap);
    const auto& r = runs[0];
    // An infeasible recourse problem has infinite expected cost.
    const bool nonneg = !r.recourse_feasible || r.gap >= -1e-8 * (1.0 + c.sol.expected_total_cost);
    std::string ties;
    for (const auto& t : r.ties) ties += "; tied bids " + t;
    const std::string what = r.recourse_feasible ? fmt::format("gap {:+.4f} $", r.gap)
                                                 : "requirement-based dispatch INFEASIBLE under recourse (gap +inf)";
    line(stable && nonneg ? "PASS" : "FAIL", "traditional-model comparison",
         fmt::format("R_U {:.3f}, R_D {:.3f}; {}; verdict stable over 10 solves: {}{}", r.req_up, r.req_down, what,
                     stable ? "yes" : "no", ties));
}

bool nonincreasing(const std::vector<double>& v, double tol) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol) return false;
    return true;
}

void sweep_line(const MarketCase& big) {
    const double tol = 1e-5;
    const int d119 = find_load(big, "d119"), d59 = find_load(big, "d59");
    auto a = run_sweep(big, "loads.d119.fluctuation_level", parse_range("0.01:0.05:5"));
    std::vector<double> p119, p59, up7;
    bool solved = true;
    for (const auto& p : a) {
        solved &= p.solved;
        if (!p.solved) continue;
        p119.push_back(p.fluctuation_payment[d119]);
        p59.push_back(p.fluctuation_payment[d59]);
    }
    // G7 sits at bus 15 with d15
    int g7 = -1;
    for (int j = 0; j < big.n_gens(); ++j)
        if (big.generators[j].name == "G7") g7 = j;
    auto b = run_sweep(big, "loads.d15.fluctuation_level", parse_range("0.01:0.09:5"));
    for (const auto& p : b) {
        solved &= p.solved;
        if (p.solved) up7.push_back(-p.eta_up[g7]);
    }
    const bool ok = solved && nonincreasing(p119, tol) && nonincreasing(p59, tol) && nonincreasing(up7, tol);
    auto fmtv = [](const std::vector<double>& v, double sign) {
        std::string s;
        for (double x : v) s += fmt::format("{}{:.4f}", s.empty() ? "" : ", ", sign * x);
        return s;
    };
    line(ok ? "PASS" : "FAIL", "sweep qualitative shapes",
         fmt::format("d119 level 0.01..0.05: Pi_d119 ({}) Pi_d59 ({}); d15 level 0.01..0.09: eta_U(G7 @ bus {}) ({})",
                     fmtv(p119, 1), fmtv(p59, 1), big.buses[big.generators[g7].bus].name, fmtv(up7, -1)));
}

}  // namespace

int main() {
    try {
        auto two = clear(fixture_twobus());
        auto big = clear(fixture_ieee118());
        revenue_adequacy_line(two, big);
        uniform_pricing_line(two, big);
        regression_line(two);
        lp_oracle_line();
        kkt_line(two, big);
        envelope_line(two);
        comparison_line(two);
        sweep_line(big.mc);
    } catch (const std::exception& e) {
        line("FAIL", "acceptance run", e.what());
    }
    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
