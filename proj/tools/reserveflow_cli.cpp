#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fmt/format.h>
#include <iostream>
#include <random>
#include <sstream>

#include "random_lp.hpp"
#include "reserveflow/clearing.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/io.hpp"
#include "reserveflow/pricing.hpp"
#include "reserveflow/reports.hpp"
#include "reserveflow/settlement.hpp"
#include "reserveflow/sweep.hpp"
#include "reserveflow/verify.hpp"

using namespace reserveflow;

namespace {

enum Exit { ok = 0, usage = 1, infeasible = 2, verify_failed = 3, io = 4 };

// Built-in fixtures by name, anything else is a case file.
MarketCase load_case(const std::string& what) {
    if (what == "twobus") return fixture_twobus();
    if (what == "ieee118") return fixture_ieee118();
    return parse_case(what);
}

struct Globals {
    std::string format = "md";
    double tolerance = 1e-6;
    bool no_verify = false;
    unsigned long seed = 20240601;
};

VerifyOptions verify_options(const Globals& g) {
    VerifyOptions v;
    v.price_tolerance = v.adequacy_tolerance = v.identity_tolerance = g.tolerance;
    return v;
}

std::string render_reports(const std::vector<VerificationReport>& r, Format f) {
    if (f == Format::md) return reports_markdown(r);
    std::string out = "check,status,worst_residual,details\n";
    for (const auto& x : r) {
        std::string d;
        for (const auto& s : x.offenders) d += (d.empty() ? "" : "; ") + s;
        for (const auto& s : x.notes) d += (d.empty() ? "" : "; ") + s;
        for (auto& ch : d)
            if (ch == ',') ch = ';';
        out += fmt::format("{},{},{:.6e},{}\n", x.check, to_string(x.status), x.worst, d);
    }
    return out;
}

struct Cleared {
    MarketCase mc;
    ClearingSolution sol;
    PriceSet prices;
    SettlementLedger ledger;
};

Cleared clear(const std::string& path) {
    Cleared c{load_case(path), {}, {}, {}};
    c.sol = solve_clearing(c.mc);
    c.prices = price(c.sol, c.mc);
    c.ledger = settle(c.sol, c.prices, c.mc);
    return c;
}

// Verification after solve/price/settle; a FAIL turns into exit code 3.
int post_verify(const Cleared& c, const Globals& g) {
    if (g.no_verify) return ok;
    auto opt = verify_options(g);
    opt.phase_angle = false;  // the full cross-check lives in `verify`
    auto r = verify_all(c.mc, c.sol, c.prices, c.ledger, opt);
    auto s = overall(r);
    if (s != CheckStatus::pass) std::cerr << render_reports(r, Format::md);
    return s == CheckStatus::fail ? verify_failed : ok;
}

int lp_check(int count, const Globals& g) {
    std::mt19937_64 rng(g.seed);
    int bad = 0;
    for (int i = 0; i < count; ++i) {
        auto p = testutil::random_lp(rng, 0.2);
        auto a = solve(p);
        auto b = vertex_oracle(p);
        bool same = a.status == b.status &&
                    (a.status != LpStatus::Optimal || std::abs(a.objective - b.objective) <= 1e-8 * (1 + std::abs(b.objective)));
        if (!same) {
            ++bad;
            std::cout << fmt::format("lp {}: solver {} {:.12g} vs oracle {} {:.12g}\n", i, to_string(a.status),
                                     a.objective, to_string(b.status), b.objective);
        }
    }
    std::cout << fmt::format("{} of {} random LPs agree with the vertex oracle (seed {})\n", count - bad, count, g.seed);
    return bad ? verify_failed : ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario-based energy and reserve market clearing"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "md"}));
    app.add_option("--tolerance", g.tolerance, "Verification tolerance");
    app.add_flag("--no-verify", g.no_verify, "Skip the checks after solve/price/settle");
    app.add_option("--seed", g.seed, "Seed for random test LPs");

    std::string case_path, realized, param, range, out_path, emit_dir, lp_path;
    std::optional<double> ru, rd;
    int lp_count = 200;
    bool write_calibration = false;

    auto* solve_cmd = app.add_subcommand("solve", "Clear the scenario model and print dispatch and prices");
    auto* price_cmd = app.add_subcommand("price", "Print bus and resource prices");
    auto* settle_cmd = app.add_subcommand("settle", "Print the settlement ledger");
    auto* verify_cmd = app.add_subcommand("verify", "Run every pricing and settlement check");
    auto* compare_cmd = app.add_subcommand("compare", "Compare with the requirement-based model");
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one case parameter");
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the built-in cases as case files");
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit the unpublished two-bus parameters");
    auto* lp_cmd = app.add_subcommand("lp-check", "Random LPs against the vertex oracle");
    for (auto* c : {solve_cmd, price_cmd, settle_cmd, verify_cmd, compare_cmd, sweep_cmd})
        c->add_option("case", case_path, "Case file, or twobus / ieee118")->required();
    solve_cmd->add_option("--lp", lp_path, "Also write the clearing LP here (CPLEX LP text)");
    settle_cmd->add_option("--realized", realized, "Scenario index or name (0 = base)");
    compare_cmd->add_option("--ru", ru, "Upward reserve requirement");
    compare_cmd->add_option("--rd", rd, "Downward reserve requirement");
    sweep_cmd->add_option("--param", param, "Parameter path, e.g. loads.d119.fluctuation_level")->required();
    sweep_cmd->add_option("--range", range, "a:b:n")->required();
    sweep_cmd->add_option("--out", out_path, "Write the CSV here instead of stdout");
    fixtures_cmd->add_option("--emit", emit_dir, "Directory")->required();
    calibrate_cmd->add_flag("--write", write_calibration, "Overwrite the committed calibration file");
    lp_cmd->add_option("--count", lp_count, "Number of problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? ok : usage;
    }

    try {
        const Format fmt_out = parse_format(g.format);
        if (solve_cmd->parsed()) {
            auto c = clear(case_path);
            if (!lp_path.empty()) {
                std::ostringstream os;
                write_lp_text(build_model_two(c.mc).lp, os);
                write_file(lp_path, os.str());
            }
            std::cout << clearing_table(c.mc, c.sol, c.prices, c.ledger, fmt_out);
            return post_verify(c, g);
        }
        if (price_cmd->parsed()) {
            auto c = clear(case_path);
            std::cout << price_table(c.mc, c.prices, fmt_out);
            return post_verify(c, g);
        }
        if (settle_cmd->parsed()) {
            auto c = clear(case_path);
            std::cout << ledger_table(c.ledger, fmt_out);
            if (!realized.empty()) {
                // numbers count scenarios from 1, with 0 for the base case
                bool numeric = realized.find_first_not_of("0123456789") == std::string::npos;
                auto e = numeric ? settle_ex_post(c.sol, c.mc, std::stoi(realized) - 1)
                                 : settle_ex_post(c.sol, c.mc, realized);
                std::cout << "\n" << ex_post_table(c.mc, e, fmt_out);
            }
            return post_verify(c, g);
        }
        if (verify_cmd->parsed()) {
            auto c = clear(case_path);
            auto r = verify_all(c.mc, c.sol, c.prices, c.ledger, verify_options(g));
            std::cout << render_reports(r, fmt_out);
            std::cout << (fmt_out == Format::md ? "\nOverall: " : "overall,") << to_string(overall(r)) << "\n";
            return overall(r) == CheckStatus::fail ? verify_failed : ok;
        }
        if (compare_cmd->parsed()) {
            auto c = clear(case_path);
            auto cmp = compare_traditional(c.mc, c.sol, ru, rd);
            std::cout << render_reports({comparison_report(cmp)}, fmt_out);
            return ok;
        }
        if (sweep_cmd->parsed()) {
            auto mc = load_case(case_path);
            auto pts = run_sweep(mc, param, parse_range(range));
            auto csv = sweep_csv(mc, param, pts);
            if (out_path.empty()) std::cout << csv;
            else write_file(out_path, csv);
            return ok;
        }
        if (fixtures_cmd->parsed()) {
            std::filesystem::create_directories(emit_dir);
            write_case(fixture_twobus(), std::filesystem::path(emit_dir) / "twobus.case.json");
            write_case(fixture_ieee118(), std::filesystem::path(emit_dir) / "ieee118.case.json");
            std::cout << "wrote twobus.case.json and ieee118.case.json to " << emit_dir << "\n";
            return ok;
        }
        if (calibrate_cmd->parsed()) {
            const auto target = write_calibration ? data_dir() / "twobus_calibration.json" : std::filesystem::path{};
            try {
                auto r = calibrate_twobus({}, target);
                std::cout << "PASS " << r.note << "\n";
            } catch (const CalibrationFailed& e) {
                std::cout << "WARN " << e.what() << "\n";
            }
            return ok;
        }
        if (lp_cmd->parsed()) return lp_check(lp_count, g);
    } catch (const InfeasibleMarket& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const UnboundedMarket& e) {
        std::cerr << "unbounded: " << e.what() << "\n";
        return infeasible;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return io;
    } catch (const SchemaError& e) {
        std::cerr << e.what() << "\n";
        return io;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return io;
    } catch (const MissingData& e) {
        std::cerr << e.what() << "\n";
        return io;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return io;
    } catch (const UnknownScenario& e) {
        std::cerr << e.what() << "\n";
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return usage;
}
