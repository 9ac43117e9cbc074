#include "contagion/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace contagion {

namespace {

std::uint64_t edge_key(std::uint32_t creditor, std::uint32_t debtor, int n_banks) {
    return static_cast<std::uint64_t>(creditor) * static_cast<std::uint64_t>(n_banks) + debtor;
}

// Exact weighted sampling without replacement by cumulative sums over
// (degree+1). Fallback when rejection sampling keeps colliding (only happens
// when the batch nearly exhausts the existing banks).
void pick_exact(const std::vector<int>& degree, int existing, int count,
                std::vector<std::uint8_t>& mark, std::vector<std::uint32_t>& out,
                RandomStream& rng) {
    std::vector<double> cumulative(static_cast<std::size_t>(existing));
    while (static_cast<int>(out.size()) < count) {
        double total = 0.0;
        for (int i = 0; i < existing; ++i) {
            if (!mark[static_cast<std::size_t>(i)])
                total += static_cast<double>(degree[static_cast<std::size_t>(i)] + 1);
            cumulative[static_cast<std::size_t>(i)] = total;
        }
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        long idx = it - cumulative.begin();
        if (idx >= existing) idx = existing - 1;
        long probe = idx;
        while (probe >= 0 && mark[static_cast<std::size_t>(probe)]) --probe;
        if (probe < 0) {
            probe = idx + 1;
            while (mark[static_cast<std::size_t>(probe)]) ++probe;
        }
        mark[static_cast<std::size_t>(probe)] = 1;
        out.push_back(static_cast<std::uint32_t>(probe));
    }
}

// count distinct banks among 0..existing-1, each with probability proportional
// to total degree + 1. The endpoint bag holds both endpoints of every committed
// edge, so bag hits are degree-proportional and the uniform remainder supplies
// the +1 term.
void pick_preferential(const std::vector<std::uint32_t>& endpoint_bag,
                       const std::vector<int>& degree, int existing, int count,
                       std::vector<std::uint8_t>& mark, std::vector<std::uint32_t>& out,
                       RandomStream& rng) {
    out.clear();
    if (count >= existing) {
        for (int i = 0; i < existing; ++i) out.push_back(static_cast<std::uint32_t>(i));
        return;
    }
    const std::uint64_t total_weight = endpoint_bag.size() + static_cast<std::uint64_t>(existing);
    long long budget = 64LL * count + 256;
    while (static_cast<int>(out.size()) < count && budget > 0) {
        --budget;
        const std::uint64_t pick = rng.uniform_index(total_weight);
        const std::uint32_t bank = pick < endpoint_bag.size()
                                       ? endpoint_bag[pick]
                                       : static_cast<std::uint32_t>(pick - endpoint_bag.size());
        if (mark[bank]) continue;
        mark[bank] = 1;
        out.push_back(bank);
    }
    if (static_cast<int>(out.size()) < count) pick_exact(degree, existing, count, mark, out, rng);
    for (const std::uint32_t b : out) mark[b] = 0;
}

} // namespace

std::vector<int> Topology::in_degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_banks), 0);
    for (const Edge& e : edges) ++deg[e.debtor];
    return deg;
}

std::vector<int> Topology::out_degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_banks), 0);
    for (const Edge& e : edges) ++deg[e.creditor];
    return deg;
}

double Topology::denseness() const {
    if (n_banks < 2) return 0.0;
    return static_cast<double>(edges.size()) /
           (static_cast<double>(n_banks) * static_cast<double>(n_banks - 1));
}

int Topology::shadow_count() const {
    return static_cast<int>(std::count(bank_class.begin(), bank_class.end(), BankClass::Shadow));
}

std::vector<double> WeightedNetwork::loans_made() const {
    std::vector<double> loans(static_cast<std::size_t>(topology.n_banks), 0.0);
    for (std::size_t i = 0; i < topology.edges.size(); ++i)
        loans[topology.edges[i].creditor] += weights[i];
    return loans;
}

std::vector<double> WeightedNetwork::borrowings() const {
    std::vector<double> borrowed(static_cast<std::size_t>(topology.n_banks), 0.0);
    for (std::size_t i = 0; i < topology.edges.size(); ++i)
        borrowed[topology.edges[i].debtor] += weights[i];
    return borrowed;
}

int shadow_count_for_fraction(double shadow_fraction, int n_banks) {
    if (shadow_fraction < 0.0 || shadow_fraction > 1.0)
        throw std::invalid_argument("shadow fraction must lie in [0,1]");
    return static_cast<int>(std::llround(shadow_fraction * n_banks));
}

Topology generate_scale_free(int n_banks, double denseness, Seed seed) {
    if (n_banks < 2) throw std::invalid_argument("generate_scale_free: need at least 2 banks");
    if (!(denseness > 0.0) || denseness > 1.0)
        throw std::invalid_argument("generate_scale_free: denseness must lie in (0,1]");

    const int m = static_cast<int>(std::ceil(denseness * (n_banks - 1)));
    if (m < 1) throw std::invalid_argument("generate_scale_free: denseness too small for N");
    const int seed_size = std::min(n_banks, std::max(2, m));

    RandomStream rng(seed);
    Topology topo;
    topo.n_banks = n_banks;
    topo.bank_class.assign(static_cast<std::size_t>(n_banks), BankClass::Regulated);
    topo.layer.assign(static_cast<std::size_t>(n_banks), LayerTag::None);

    std::vector<int> degree(static_cast<std::size_t>(n_banks), 0);
    std::vector<std::uint32_t> endpoint_bag;
    endpoint_bag.reserve(4 * static_cast<std::size_t>(m) * static_cast<std::size_t>(n_banks));

    auto commit = [&](std::uint32_t creditor, std::uint32_t debtor) {
        topo.edges.push_back({creditor, debtor});
        ++degree[creditor];
        ++degree[debtor];
        endpoint_bag.push_back(creditor);
        endpoint_bag.push_back(debtor);
    };

    // seed clique
    for (int i = 0; i < seed_size; ++i)
        for (int j = 0; j < seed_size; ++j)
            if (i != j) commit(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));

    // growth: each new bank opens m loans to and m loans from existing banks,
    // both chosen against the degree snapshot taken at its arrival
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(n_banks), 0);
    std::vector<std::uint32_t> targets;
    std::vector<std::uint32_t> sources;
    for (int t = seed_size; t < n_banks; ++t) {
        // both batches sample against the bag as it stood at this bank's arrival;
        // commits happen only after both are drawn
        pick_preferential(endpoint_bag, degree, t, m, mark, targets, rng);
        pick_preferential(endpoint_bag, degree, t, m, mark, sources, rng);
        const auto bank = static_cast<std::uint32_t>(t);
        for (const std::uint32_t x : targets) commit(bank, x);
        for (const std::uint32_t y : sources) commit(y, bank);
    }

    // adjust to the exact target edge count
    const auto target = static_cast<long long>(
        std::llround(denseness * static_cast<double>(n_banks) * static_cast<double>(n_banks - 1)));
    auto current = static_cast<long long>(topo.edges.size());
    while (current > target) {
        const std::uint64_t idx = rng.uniform_index(static_cast<std::uint64_t>(current));
        topo.edges[idx] = topo.edges.back();
        topo.edges.pop_back();
        --current;
    }
    if (current < target) {
        std::unordered_set<std::uint64_t> present;
        present.reserve(static_cast<std::size_t>(target) * 2);
        for (const Edge& e : topo.edges) present.insert(edge_key(e.creditor, e.debtor, n_banks));
        long long tries = 1000 * (target - current) + 1000;
        while (current < target && tries > 0) {
            --tries;
            const auto i = static_cast<std::uint32_t>(rng.uniform_index(n_banks));
            auto j = static_cast<std::uint32_t>(rng.uniform_index(n_banks - 1));
            if (j >= i) ++j;
            if (present.insert(edge_key(i, j, n_banks)).second) {
                topo.edges.push_back({i, j});
                ++current;
            }
        }
        if (current < target) {
            // dense corner: enumerate the missing pairs and draw from them
            std::vector<Edge> missing;
            for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n_banks); ++i)
                for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(n_banks); ++j)
                    if (i != j && !present.count(edge_key(i, j, n_banks)))
                        missing.push_back({i, j});
            while (current < target) {
                const std::uint64_t k = rng.uniform_index(missing.size());
                topo.edges.push_back(missing[k]);
                missing[k] = missing.back();
                missing.pop_back();
                ++current;
            }
        }
    }
    return topo;
}

std::vector<double> weights_for_exponent(const Topology& topology, double exponent) {
    if (topology.edges.empty()) throw std::invalid_argument("weights: topology has no edges");
    if (exponent < 0.0) throw std::invalid_argument("weights: exponent must be >= 0");
    const std::vector<int> k_in = topology.in_degrees();
    const std::vector<int> k_out = topology.out_degrees();
    std::vector<double> log_factor(topology.edges.size());
    double max_log = 0.0;
    for (std::size_t i = 0; i < topology.edges.size(); ++i) {
        const Edge& e = topology.edges[i];
        log_factor[i] = std::log(static_cast<double>(std::max(k_in[e.creditor], 1)) *
                                 static_cast<double>(std::max(k_out[e.debtor], 1)));
        max_log = std::max(max_log, log_factor[i]);
    }
    std::vector<double> w(topology.edges.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::max(std::exp(exponent * (log_factor[i] - max_log)), 1e-300);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

double top5_loan_share(const Topology& topology, std::span<const double> weights) {
    std::vector<double> loans(static_cast<std::size_t>(topology.n_banks), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < topology.edges.size(); ++i) {
        loans[topology.edges[i].creditor] += weights[i];
        total += weights[i];
    }
    if (total <= 0.0) throw std::invalid_argument("top5_loan_share: zero total loan value");
    const std::size_t top = std::min<std::size_t>(5, loans.size());
    std::partial_sort(loans.begin(), loans.begin() + static_cast<long>(top), loans.end(),
                      std::greater<>());
    const double top_sum = std::accumulate(loans.begin(), loans.begin() + static_cast<long>(top), 0.0);
    return top_sum / total;
}

WeightedNetwork assign_weights(const Topology& topology, double target_concentration,
                               double tolerance) {
    if (topology.edges.empty()) throw std::invalid_argument("assign_weights: topology has no edges");
    if (!(target_concentration > 0.0) || target_concentration > 1.0)
        throw std::invalid_argument("assign_weights: target concentration must lie in (0,1]");
    if (!(tolerance > 0.0)) throw std::invalid_argument("assign_weights: tolerance must be > 0");

    // 10 is too small a cap for the layered preset: the top-5 share over 1000
    // banks can still sit below 0.23 there. 40 is far past every preset's
    // crossing point and stays exp-safe with the rescale below.
    constexpr double kExponentCap = 40.0;
    constexpr int kMaxIterations = 60;

    // log factors precomputed once; exp per bisection step
    const std::vector<int> k_in = topology.in_degrees();
    const std::vector<int> k_out = topology.out_degrees();
    const std::size_t n_edges = topology.edges.size();
    std::vector<double> log_factor(n_edges);
    double max_log = 0.0;
    for (std::size_t i = 0; i < n_edges; ++i) {
        const Edge& e = topology.edges[i];
        log_factor[i] = std::log(static_cast<double>(std::max(k_in[e.creditor], 1)) *
                                 static_cast<double>(std::max(k_out[e.debtor], 1)));
        max_log = std::max(max_log, log_factor[i]);
    }

    std::vector<double> weights(n_edges);
    auto share_at = [&](double r) {
        double total = 0.0;
        for (std::size_t i = 0; i < n_edges; ++i) {
            // rescaled so the largest term is 1; tiny ratios clamped away from 0
            weights[i] = std::max(std::exp(r * (log_factor[i] - max_log)), 1e-300);
            total += weights[i];
        }
        for (double& w : weights) w /= total;
        return top5_loan_share(topology, weights);
    };

    auto finish = [&](double r, double share) {
        WeightedNetwork net;
        net.topology = topology;
        net.weights = weights;
        net.exponent = r;
        net.realized_concentration = share;
        return net;
    };

    const double share0 = share_at(0.0);
    if (target_concentration < share0 - tolerance)
        throw std::runtime_error("assign_weights: target concentration below the uniform-weight "
                                 "(r=0) concentration; unreachable");
    if (std::abs(share0 - target_concentration) <= tolerance) return finish(0.0, share0);

    const double share_cap = share_at(kExponentCap);
    if (target_concentration > share_cap + tolerance)
        throw std::runtime_error("assign_weights: target concentration not reached at the exponent "
                                 "cap r=40; unreachable");
    if (std::abs(share_cap - target_concentration) <= tolerance)
        return finish(kExponentCap, share_cap);

    double lo = 0.0;
    double hi = kExponentCap;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double share = share_at(mid);
        if (std::abs(share - target_concentration) <= tolerance) return finish(mid, share);
        if (share < target_concentration)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("assign_weights: bisection did not meet the tolerance within 60 "
                             "iterations");
}

Topology mix_random(const Topology& topology, double shadow_fraction, Seed seed) {
    const int n = topology.n_banks;
    const int n_shadow = shadow_count_for_fraction(shadow_fraction, n);
    RandomStream rng(seed);
    std::vector<std::uint32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0U);
    for (int i = 0; i < n_shadow; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(order[i], order[j]);
    }
    Topology out = topology;
    out.bank_class.assign(static_cast<std::size_t>(n), BankClass::Regulated);
    for (int i = 0; i < n_shadow; ++i) out.bank_class[order[i]] = BankClass::Shadow;
    return out;
}

Topology mix_asset_correlated(const WeightedNetwork& network, double shadow_fraction,
                              std::span<const double> bank_assets) {
    const int n = network.topology.n_banks;
    if (static_cast<int>(bank_assets.size()) != n)
        throw std::invalid_argument("mix_asset_correlated: asset vector size mismatch");
    const int n_shadow = shadow_count_for_fraction(shadow_fraction, n);
    const int n_regulated = n - n_shadow;

    std::vector<std::uint32_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (bank_assets[a] != bank_assets[b]) return bank_assets[a] > bank_assets[b];
        return a < b;
    });

    Topology out = network.topology;
    out.bank_class.assign(static_cast<std::size_t>(n), BankClass::Shadow);
    for (int i = 0; i < n_regulated; ++i) out.bank_class[order[i]] = BankClass::Regulated;
    return out;
}

WeightedNetwork build_layered(int n_per_layer, double denseness, double relative_coupling,
                              double target_concentration, double tolerance, Seed seed) {
    if (n_per_layer < 2) throw std::invalid_argument("build_layered: need at least 2 banks per layer");
    if (relative_coupling < 0.0 || relative_coupling > 1.0)
        throw std::invalid_argument("build_layered: relative coupling must lie in [0,1]");

    const Topology shadow_layer = generate_scale_free(n_per_layer, denseness, derive_seed(seed, 0));
    const Topology regulated_layer =
        generate_scale_free(n_per_layer, denseness, derive_seed(seed, 1));

    const int n_total = 2 * n_per_layer;
    Topology combined;
    combined.n_banks = n_total;
    combined.bank_class.assign(static_cast<std::size_t>(n_total), BankClass::Shadow);
    combined.layer.assign(static_cast<std::size_t>(n_total), LayerTag::ShadowLayer);
    for (int i = n_per_layer; i < n_total; ++i) {
        combined.bank_class[i] = BankClass::Regulated;
        combined.layer[i] = LayerTag::RegulatedLayer;
    }
    combined.edges = shadow_layer.edges;
    combined.edges.reserve(2 * shadow_layer.edges.size() + 16);
    const auto offset = static_cast<std::uint32_t>(n_per_layer);
    for (const Edge& e : regulated_layer.edges)
        combined.edges.push_back({e.creditor + offset, e.debtor + offset});

    // cross-layer loans: ordered pairs, creditor and debtor sides both random,
    // denseness relative_coupling * denseness over the 2*n^2 cross pairs
    const double cross_pairs = 2.0 * static_cast<double>(n_per_layer) * n_per_layer;
    const auto n_cross =
        static_cast<long long>(std::llround(relative_coupling * denseness * cross_pairs));
    RandomStream rng(derive_seed(seed, 2));
    std::unordered_set<std::uint64_t> present;
    present.reserve(static_cast<std::size_t>(n_cross) * 2 + 8);
    long long added = 0;
    long long tries = 1000 * (n_cross + 1);
    while (added < n_cross && tries > 0) {
        --tries;
        const bool shadow_lends = rng.uniform_index(2) == 0;
        const auto a = static_cast<std::uint32_t>(rng.uniform_index(n_per_layer));
        const auto b = static_cast<std::uint32_t>(rng.uniform_index(n_per_layer)) + offset;
        const std::uint32_t creditor = shadow_lends ? a : b;
        const std::uint32_t debtor = shadow_lends ? b : a;
        if (present.insert(edge_key(creditor, debtor, n_total)).second) {
            combined.edges.push_back({creditor, debtor});
            ++added;
        }
    }
    if (added < n_cross) {
        std::vector<Edge> missing;
        for (std::uint32_t a = 0; a < offset; ++a)
            for (std::uint32_t b = offset; b < static_cast<std::uint32_t>(n_total); ++b) {
                if (!present.count(edge_key(a, b, n_total))) missing.push_back({a, b});
                if (!present.count(edge_key(b, a, n_total))) missing.push_back({b, a});
            }
        while (added < n_cross) {
            const std::uint64_t k = rng.uniform_index(missing.size());
            combined.edges.push_back(missing[k]);
            missing[k] = missing.back();
            missing.pop_back();
            ++added;
        }
    }

    return assign_weights(combined, target_concentration, tolerance);
}

} // namespace contagion
