#pragma once

#include <span>
#include <vector>

#include "contagion/network.hpp"

namespace contagion {

// Per-bank balance sheet. Both identities hold exactly:
//   assets = interbank_loans + external_assets
//   assets = equity + interbank_borrowings + deposits
struct BalanceSheet {
    double assets = 0.0;              // a
    double interbank_loans = 0.0;     // l
    double external_assets = 0.0;     // e
    double equity = 0.0;              // c
    double interbank_borrowings = 0.0; // b
    double deposits = 0.0;            // d
    double equity_ratio = 0.0;        // gamma
};

struct SystemParams {
    double interbank_ratio = 0.3;  // theta
    double gamma_shadow = 0.06;
    double gamma_regulated = 0.1;

    void validate() const;
};

struct SynthesisResult {
    std::vector<BalanceSheet> sheets;
    double realized_interbank_ratio = 0.0; // sum l / sum a
};

// Builds sheets from a weighted network: l and b from the loan values, each
// bank anchored at a = l/theta and repaired upward so external assets cover net
// borrowings and deposits stay non-negative. Banks with no interbank position
// get one unit of external assets.
SynthesisResult synthesize(const WeightedNetwork& network, const SystemParams& params);

// Aggregate equity ratio: sum c / sum a.
double average_gamma(std::span<const BalanceSheet> sheets);

// Same banks with a uniform equity ratio: a, l, e, b unchanged, only the c/d
// split moves. Deposits may go negative for banks whose repair bound was tight;
// the result is a hypothetical comparison system, not a feasible one.
std::vector<BalanceSheet> homogenize(std::span<const BalanceSheet> sheets, double gamma_bar);

// Class-independent bank sizes max(l/theta, b), used to rank banks before any
// class labels exist.
std::vector<double> baseline_assets(const WeightedNetwork& network, double interbank_ratio);

} // namespace contagion
