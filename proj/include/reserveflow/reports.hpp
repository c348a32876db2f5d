#pragma once

#include <string>

#include "reserveflow/clearing.hpp"
#include "reserveflow/pricing.hpp"
#include "reserveflow/settlement.hpp"

namespace reserveflow {

enum class Format { csv, md };
Format parse_format(const std::string& s);  // "csv" or "md"

// One row per generator: g, r_U, r_D, eta^g, eta^U, eta^D; then one row per load
// with eta^d and the fluctuation payment.
std::string clearing_table(const MarketCase& mc, const ClearingSolution& sol, const PriceSet& prices,
                           const SettlementLedger& ledger, Format f);

// Bus prices: omega_0 and omega_k per bus, then per-resource prices.
std::string price_table(const MarketCase& mc, const PriceSet& prices, Format f);

std::string ledger_table(const SettlementLedger& ledger, Format f);
std::string ex_post_table(const MarketCase& mc, const ExPost& e, Format f);

}  // namespace reserveflow
