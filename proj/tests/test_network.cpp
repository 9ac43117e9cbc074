#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "contagion/network.hpp"

using namespace contagion;

namespace {

// least-squares slope of log CCDF vs log degree, points strictly above the
// median degree; tail exponent alpha = 1 + |slope|
double ccdf_tail_exponent(const std::vector<int>& degrees) {
    std::vector<int> sorted = degrees;
    std::sort(sorted.begin(), sorted.end());
    const int median = sorted[sorted.size() / 2];
    std::map<int, int> count_at_least; // degree -> #banks with degree >= k
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) ++count_at_least[*it];
    std::vector<double> xs;
    std::vector<double> ys;
    int running = 0;
    for (auto it = count_at_least.rbegin(); it != count_at_least.rend(); ++it) {
        running += it->second;
        if (it->first > median && it->first > 0) {
            xs.push_back(std::log(static_cast<double>(it->first)));
            ys.push_back(std::log(static_cast<double>(running) / sorted.size()));
        }
    }
    REQUIRE(xs.size() >= 3);
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return 1.0 + std::abs(slope);
}

bool no_self_loops_and_binary(const Topology& topo) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const Edge& e : topo.edges) {
        if (e.creditor == e.debtor) return false;
        if (!seen.insert({e.creditor, e.debtor}).second) return false;
    }
    return true;
}

} // namespace

TEST_CASE("two banks at full denseness give both directed edges") {
    const Topology topo = generate_scale_free(2, 1.0, 7);
    REQUIRE(topo.edges.size() == 2);
    CHECK(no_self_loops_and_binary(topo));
}

TEST_CASE("input validation") {
    CHECK_THROWS(generate_scale_free(1, 0.5, 1));
    CHECK_THROWS(generate_scale_free(10, 0.0, 1));
    CHECK_THROWS(generate_scale_free(10, 1.5, 1));
    CHECK_THROWS(generate_scale_free(10, -0.1, 1));
}

TEST_CASE("exact edge count, no self loops, binary adjacency") {
    for (const auto& [n, kappa] : std::vector<std::pair<int, double>>{
             {50, 0.1}, {137, 0.03}, {500, 0.05}, {20, 0.9}}) {
        const Topology topo = generate_scale_free(n, kappa, 11);
        CHECK(no_self_loops_and_binary(topo));
        const auto expected =
            static_cast<std::size_t>(std::llround(kappa * n * (n - 1.0)));
        CHECK(topo.edges.size() == expected);
        CHECK(topo.denseness() >= 0.0);
        CHECK(topo.denseness() <= 1.0);
    }
}

TEST_CASE("mean out-degree sits at denseness * (N-1) across seeds") {
    double mean = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const Topology topo = generate_scale_free(500, 0.05, static_cast<Seed>(s));
        mean += static_cast<double>(topo.edges.size()) / 500.0;
    }
    mean /= seeds;
    CHECK(mean == doctest::Approx(0.05 * 499).epsilon(0.10));
}

TEST_CASE("total-degree tail exponent averaged over 100 seeds is >= 1.8") {
    double total = 0.0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const Topology topo = generate_scale_free(200, 0.05, derive_seed(400, static_cast<Seed>(s)));
        const std::vector<int> in = topo.in_degrees();
        const std::vector<int> out = topo.out_degrees();
        std::vector<int> degree(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) degree[i] = in[i] + out[i];
        total += ccdf_tail_exponent(degree);
    }
    const double average = total / seeds;
    INFO("average fitted tail exponent ", average);
    CHECK(average >= 1.8);
}

TEST_CASE("generation is deterministic per seed") {
    const Topology a = generate_scale_free(120, 0.07, 555);
    const Topology b = generate_scale_free(120, 0.07, 555);
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].creditor == b.edges[i].creditor);
        CHECK(a.edges[i].debtor == b.edges[i].debtor);
    }
    const Topology c = generate_scale_free(120, 0.07, 556);
    bool same = a.edges.size() == c.edges.size();
    if (same)
        for (std::size_t i = 0; i < a.edges.size(); ++i)
            if (a.edges[i].creditor != c.edges[i].creditor ||
                a.edges[i].debtor != c.edges[i].debtor) {
                same = false;
                break;
            }
    CHECK_FALSE(same);
}

TEST_CASE("uniform weights at r = 0") {
    const Topology topo = generate_scale_free(40, 0.1, 3);
    const std::vector<double> w = weights_for_exponent(topo, 0.0);
    for (const double x : w) CHECK(x == doctest::Approx(w[0]).epsilon(1e-12));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("top-5 share of a <=5 lender system is 1") {
    // 5 banks in a directed ring: every bank lends, so the top five cover all
    Topology topo;
    topo.n_banks = 5;
    for (std::uint32_t i = 0; i < 5; ++i) topo.edges.push_back({i, (i + 1) % 5});
    topo.bank_class.assign(5, BankClass::Regulated);
    topo.layer.assign(5, LayerTag::None);
    const WeightedNetwork net = assign_weights(topo, 1.0, 0.02);
    CHECK(net.realized_concentration == doctest::Approx(1.0));
}

TEST_CASE("weight bisection hits the preset concentration") {
    const Topology topo = generate_scale_free(500, 0.05, 17);
    const WeightedNetwork net = assign_weights(topo, 0.25, 0.02);
    CHECK(net.realized_concentration >= 0.23);
    CHECK(net.realized_concentration <= 0.27);
    CHECK(net.exponent >= 0.0);
    const double sum = std::accumulate(net.weights.begin(), net.weights.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    for (const double w : net.weights) CHECK(w > 0.0);
}

TEST_CASE("concentration is non-decreasing in the exponent") {
    const Topology topo = generate_scale_free(200, 0.05, 23);
    double previous = -1.0;
    for (const double r : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0}) {
        const std::vector<double> w = weights_for_exponent(topo, r);
        const double share = top5_loan_share(topo, w);
        CHECK(share >= previous - 1e-9);
        previous = share;
    }
}

TEST_CASE("unreachable concentration targets are reported") {
    const Topology ba = generate_scale_free(500, 0.05, 29);
    CHECK_THROWS_AS((void)assign_weights(ba, 0.01, 0.002), std::runtime_error);

    // degree-regular ring: every exponent gives uniform weights, so the top-5
    // share is stuck at 5/N and any other target is unreachable
    Topology ring;
    ring.n_banks = 20;
    for (std::uint32_t i = 0; i < 20; ++i) ring.edges.push_back({i, (i + 1) % 20});
    ring.bank_class.assign(20, BankClass::Regulated);
    ring.layer.assign(20, LayerTag::None);
    CHECK(assign_weights(ring, 0.25, 0.01).realized_concentration == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)assign_weights(ring, 0.5, 0.01), std::runtime_error);
    CHECK_THROWS_AS((void)assign_weights(ring, 0.1, 0.01), std::runtime_error);
}

TEST_CASE("random mixing hits exact class counts on the f grid") {
    const Topology topo = generate_scale_free(30, 0.2, 31);
    for (int tenth = 0; tenth <= 10; ++tenth) {
        const double f = tenth / 10.0;
        const Topology mixed = mix_random(topo, f, 77);
        CHECK(mixed.shadow_count() == static_cast<int>(std::llround(f * 30)));
    }
    const Topology all_regulated = mix_random(topo, 0.0, 77);
    CHECK(all_regulated.shadow_count() == 0);
    const Topology all_shadow = mix_random(topo, 1.0, 77);
    CHECK(all_shadow.shadow_count() == 30);
    const Topology half = mix_random(topo, 0.5, 77);
    CHECK(half.shadow_count() == 15);
}

TEST_CASE("asset-correlated mixing ranks by assets with index tie-break") {
    Topology topo;
    topo.n_banks = 3;
    topo.edges.push_back({0, 1});
    topo.bank_class.assign(3, BankClass::Regulated);
    topo.layer.assign(3, LayerTag::None);
    WeightedNetwork net;
    net.topology = topo;
    net.weights = {1.0};

    const std::vector<double> assets{5.0, 3.0, 1.0};
    const Topology mixed = mix_asset_correlated(net, 1.0 / 3.0, assets);
    CHECK(mixed.bank_class[0] == BankClass::Regulated);
    CHECK(mixed.bank_class[1] == BankClass::Regulated);
    CHECK(mixed.bank_class[2] == BankClass::Shadow);

    const Topology all_regulated = mix_asset_correlated(net, 0.0, assets);
    CHECK(all_regulated.shadow_count() == 0);

    // ties: equal assets fall back to lower-index-is-larger
    const std::vector<double> tied{2.0, 2.0, 2.0};
    const Topology tie_mixed = mix_asset_correlated(net, 1.0 / 3.0, tied);
    CHECK(tie_mixed.bank_class[0] == BankClass::Regulated);
    CHECK(tie_mixed.bank_class[1] == BankClass::Regulated);
    CHECK(tie_mixed.bank_class[2] == BankClass::Shadow);
}

TEST_CASE("asset-correlated split separates the asset ranges") {
    const Topology topo = generate_scale_free(100, 0.08, 37);
    const WeightedNetwork net = assign_weights(topo, 0.3, 0.05);
    std::vector<double> assets(100);
    const std::vector<double> loans = net.loans_made();
    const std::vector<double> borrowed = net.borrowings();
    for (int i = 0; i < 100; ++i)
        assets[static_cast<std::size_t>(i)] =
            std::max(loans[static_cast<std::size_t>(i)] / 0.3, borrowed[static_cast<std::size_t>(i)]);
    const Topology mixed = mix_asset_correlated(net, 0.4, assets);
    double min_regulated = 1e300;
    double max_shadow = -1e300;
    for (int i = 0; i < 100; ++i) {
        if (mixed.bank_class[static_cast<std::size_t>(i)] == BankClass::Regulated)
            min_regulated = std::min(min_regulated, assets[static_cast<std::size_t>(i)]);
        else
            max_shadow = std::max(max_shadow, assets[static_cast<std::size_t>(i)]);
    }
    CHECK(min_regulated >= max_shadow);
}

TEST_CASE("layered build: decoupled at q=0, uniform at q=1, exact counts") {
    const WeightedNetwork decoupled = build_layered(40, 0.1, 0.0, 0.4, 0.05, 41);
    for (const Edge& e : decoupled.topology.edges) {
        const bool a_shadow = e.creditor < 40;
        const bool b_shadow = e.debtor < 40;
        CHECK(a_shadow == b_shadow);
    }
    CHECK(decoupled.topology.shadow_count() == 40);
    for (int i = 0; i < 40; ++i) CHECK(decoupled.topology.layer[i] == LayerTag::ShadowLayer);
    for (int i = 40; i < 80; ++i)
        CHECK(decoupled.topology.layer[i] == LayerTag::RegulatedLayer);

    const WeightedNetwork uniform = build_layered(40, 0.1, 1.0, 0.4, 0.05, 43);
    long long cross = 0;
    for (const Edge& e : uniform.topology.edges)
        if ((e.creditor < 40) != (e.debtor < 40)) ++cross;
    const double cross_density = static_cast<double>(cross) / (2.0 * 40 * 40);
    CHECK(cross_density == doctest::Approx(0.1).epsilon(0.01));

    // 3 banks per layer, kappa = 2/3, q = 0.5: 0.5 * (2/3) * 18 = 6 cross loans
    const WeightedNetwork tiny = build_layered(3, 2.0 / 3.0, 0.5, 1.0, 0.05, 47);
    long long tiny_cross = 0;
    for (const Edge& e : tiny.topology.edges)
        if ((e.creditor < 3) != (e.debtor < 3)) ++tiny_cross;
    CHECK(tiny_cross == 6);

    CHECK_THROWS(build_layered(40, 0.1, -0.01, 0.4, 0.05, 1));
    CHECK_THROWS(build_layered(40, 0.1, 1.01, 0.4, 0.05, 1));
    CHECK_THROWS(build_layered(1, 0.1, 0.5, 0.4, 0.05, 1));
}

TEST_CASE("layered networks are deterministic per seed") {
    const WeightedNetwork a = build_layered(30, 0.1, 0.2, 0.4, 0.05, 999);
    const WeightedNetwork b = build_layered(30, 0.1, 0.2, 0.4, 0.05, 999);
    REQUIRE(a.topology.edges.size() == b.topology.edges.size());
    CHECK(a.exponent == b.exponent);
    for (std::size_t i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);
}
