#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "contagion/balance_sheet.hpp"
#include "contagion/network.hpp"
#include "contagion/shocks.hpp"

namespace contagion {

struct CascadeOutcome {
    std::vector<std::uint8_t> failed; // per bank
    int total_failed = 0;
    int shadow_failed = 0;
    int regulated_failed = 0;
    int rounds = 0; // propagation iterations until quiescence
};

// Zero-recovery default cascade: round 0 applies the external-asset losses, a
// bank fails when its accumulated loss strictly exceeds its equity, and each
// newly failed debtor writes its full loan value onto its creditors. Losses
// (including portfolio gains as negative loss) accumulate additively. Runs to
// the fixed point; failures are permanent.
CascadeOutcome run_cascade(std::span<const BalanceSheet> sheets, const WeightedNetwork& network,
                           const Portfolio& portfolio, const PriceShock& shock);

// Independent oracle: enumerates all 2^N failure sets and returns the minimal
// self-consistent one (every member's loss given the set exceeds equity, every
// non-member's does not). N <= 12.
CascadeOutcome brute_force_fixed_point(std::span<const BalanceSheet> sheets,
                                       const WeightedNetwork& network, const Portfolio& portfolio,
                                       const PriceShock& shock);

} // namespace contagion
