#include "contagion/cascade.hpp"

#include <bit>
#include <stdexcept>
#include <utility>

namespace contagion {

namespace {

void check_dimensions(std::span<const BalanceSheet> sheets, const WeightedNetwork& network,
                      const Portfolio& portfolio, const PriceShock& shock) {
    const int n = network.topology.n_banks;
    if (static_cast<int>(sheets.size()) != n)
        throw std::invalid_argument("cascade: sheet count does not match the network");
    if (portfolio.n_banks != n)
        throw std::invalid_argument("cascade: portfolio rows do not match the network");
    if (static_cast<int>(shock.relative_change.size()) != portfolio.n_assets)
        throw std::invalid_argument("cascade: shock dimension does not match the portfolio");
}

void fill_counts(CascadeOutcome& outcome, const Topology& topology) {
    outcome.total_failed = 0;
    outcome.shadow_failed = 0;
    outcome.regulated_failed = 0;
    for (int i = 0; i < topology.n_banks; ++i) {
        if (!outcome.failed[static_cast<std::size_t>(i)]) continue;
        ++outcome.total_failed;
        if (topology.bank_class[static_cast<std::size_t>(i)] == BankClass::Shadow)
            ++outcome.shadow_failed;
        else
            ++outcome.regulated_failed;
    }
}

} // namespace

CascadeOutcome run_cascade(std::span<const BalanceSheet> sheets, const WeightedNetwork& network,
                           const Portfolio& portfolio, const PriceShock& shock) {
    check_dimensions(sheets, network, portfolio, shock);
    const int n = network.topology.n_banks;
    const auto& edges = network.topology.edges;

    // creditor lists grouped by debtor, so a failed debtor's loans can be
    // written onto its creditors in O(in-edges)
    std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : edges) ++offset[e.debtor + 1];
    for (int i = 0; i < n; ++i) offset[static_cast<std::size_t>(i) + 1] += offset[i];
    std::vector<std::uint32_t> creditor_of(edges.size());
    std::vector<double> exposure_of(edges.size());
    {
        std::vector<int> cursor(offset.begin(), offset.end() - 1);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const int slot = cursor[edges[i].debtor]++;
            creditor_of[static_cast<std::size_t>(slot)] = edges[i].creditor;
            exposure_of[static_cast<std::size_t>(slot)] = network.weights[i];
        }
    }

    std::vector<double> loss = initial_distress(sheets, portfolio, shock);

    CascadeOutcome outcome;
    outcome.failed.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::uint32_t> newly_failed;
    for (int i = 0; i < n; ++i) {
        if (loss[static_cast<std::size_t>(i)] > sheets[static_cast<std::size_t>(i)].equity) {
            outcome.failed[static_cast<std::size_t>(i)] = 1;
            newly_failed.push_back(static_cast<std::uint32_t>(i));
        }
    }

    outcome.rounds = 0;
    std::vector<std::uint32_t> next;
    for (int round = 1; !newly_failed.empty(); ++round) {
        next.clear();
        for (const std::uint32_t debtor : newly_failed) {
            for (int slot = offset[debtor]; slot < offset[static_cast<std::size_t>(debtor) + 1];
                 ++slot) {
                const std::uint32_t creditor = creditor_of[static_cast<std::size_t>(slot)];
                if (outcome.failed[creditor]) continue;
                loss[creditor] += exposure_of[static_cast<std::size_t>(slot)];
                if (loss[creditor] > sheets[creditor].equity) {
                    outcome.failed[creditor] = 1;
                    next.push_back(creditor);
                }
            }
        }
        std::swap(newly_failed, next);
        if (!newly_failed.empty()) outcome.rounds = round;
    }

    fill_counts(outcome, network.topology);
    return outcome;
}

CascadeOutcome brute_force_fixed_point(std::span<const BalanceSheet> sheets,
                                       const WeightedNetwork& network, const Portfolio& portfolio,
                                       const PriceShock& shock) {
    check_dimensions(sheets, network, portfolio, shock);
    const int n = network.topology.n_banks;
    if (n > 12) throw std::invalid_argument("brute_force_fixed_point: limited to N <= 12");

    const std::vector<double> base_loss = initial_distress(sheets, portfolio, shock);
    const auto& edges = network.topology.edges;

    std::uint32_t best = 0;
    int best_size = n + 1;
    bool found = false;
    for (std::uint32_t candidate = 0; candidate < (1U << n); ++candidate) {
        std::vector<double> loss = base_loss;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (candidate & (1U << edges[i].debtor)) loss[edges[i].creditor] += network.weights[i];
        bool consistent = true;
        for (int bank = 0; bank < n && consistent; ++bank) {
            const bool fails = loss[static_cast<std::size_t>(bank)] >
                               sheets[static_cast<std::size_t>(bank)].equity;
            const bool in_set = (candidate & (1U << bank)) != 0;
            consistent = fails == in_set;
        }
        if (!consistent) continue;
        const int size = std::popcount(candidate);
        if (!found || size < best_size) {
            best = candidate;
            best_size = size;
            found = true;
        }
    }
    if (!found)
        throw std::runtime_error("brute_force_fixed_point: no self-consistent failure set (should "
                                 "be impossible for a monotone cascade)");

    CascadeOutcome outcome;
    outcome.failed.assign(static_cast<std::size_t>(n), 0);
    for (int bank = 0; bank < n; ++bank)
        outcome.failed[static_cast<std::size_t>(bank)] = (best & (1U << bank)) ? 1 : 0;
    // rounds are not defined by the enumeration; report the count the
    // propagation would need (0 or the longest chain is irrelevant here)
    outcome.rounds = -1;
    fill_counts(outcome, network.topology);
    return outcome;
}

} // namespace contagion
