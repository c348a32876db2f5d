#pragma once

#include <array>
#include <string>
#include <vector>

#include "reserveflow/clearing.hpp"
#include "reserveflow/pricing.hpp"

namespace reserveflow {

// Ledger rows in report order.
enum class LedgerRow { gamma_d, pi_d, phi_d, gamma_g, gamma_up, gamma_down, phi_up, phi_down, delta };
inline constexpr int kLedgerRows = 9;
const char* row_label(LedgerRow r);  // "Gamma_d", "Pi_d", ...

struct LedgerColumn {
    std::string name;  // "Base", "S1", ..., "Total"
    std::array<double, kLedgerRows> v{};
    double& operator[](LedgerRow r) { return v[static_cast<int>(r)]; }
    double operator[](LedgerRow r) const { return v[static_cast<int>(r)]; }

    // (Gamma_d + Pi_d) - (Gamma_g + Gamma_U + Gamma_D + eps Phi_U - eps Phi_D + eps Phi_d + Delta)
    double residual() const;
    double gross() const;  // sum of magnitudes, used to make the residual relative
};

struct SettlementLedger {
    std::vector<LedgerColumn> columns;  // Base, S1..SK
    LedgerColumn total;

    // Per-resource parts, [column][resource]; column 0 is the base case.
    Matrix2 gamma_g, gamma_d, gamma_up, gamma_down;
    std::vector<double> fluctuation_payment;  // Pi^d(l), summed over scenarios
    Matrix2 fluctuation_by_scenario;          // [k][l]

    // Realized (unweighted) re-dispatch money per scenario, [k][resource].
    Matrix2 phi_up, phi_down, phi_shed;
};

// Ex-ante items: energy, reserve and fluctuation charges.
SettlementLedger settle_ex_ante(const ClearingSolution& sol, const PriceSet& prices, const MarketCase& mc);

struct ExPost {
    int scenario = -1;  // -1 for the base case
    std::string name;
    std::vector<double> phi_up, phi_down, phi_shed;  // per generator / load, $
    double total_up = 0, total_down = 0, total_shed = 0;
};

// Money that changes hands once scenario k (or the base case, k = -1) is realized.
ExPost settle_ex_post(const ClearingSolution& sol, const MarketCase& mc, int realized);
ExPost settle_ex_post(const ClearingSolution& sol, const MarketCase& mc, const std::string& realized);

struct Rents {
    double base = 0.0;
    std::vector<double> scenario;
    bool reverse_binding = false;  // some reverse-direction limit carries a multiplier
    std::vector<std::string> reverse_lines;
};

Rents congestion_rent(const ClearingSolution& sol, const MarketCase& mc);

// Full ledger: ex-ante items plus expected re-dispatch flows and rents.
SettlementLedger settle(const ClearingSolution& sol, const PriceSet& prices, const MarketCase& mc);

struct Adequacy {
    std::vector<std::string> column;
    std::vector<double> residual, relative;
    double worst_relative = 0.0;
    bool pass = false;
};

Adequacy revenue_adequacy(const SettlementLedger& ledger, double tolerance = 1e-6);

// Table layout: rows are ledger items, columns Base, S1..SK, Total.
std::string ledger_csv(const SettlementLedger& ledger);
std::string ledger_markdown(const SettlementLedger& ledger, int decimals = 1);

struct LedgerTable {
    std::vector<std::string> columns;
    std::vector<std::string> rows;
    std::vector<std::vector<double>> values;  // [row][column]
};
LedgerTable parse_ledger_csv(const std::string& text);

}  // namespace reserveflow
