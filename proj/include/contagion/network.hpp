#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

enum class BankClass : std::uint8_t { Shadow, Regulated };
enum class LayerTag : std::uint8_t { None, ShadowLayer, RegulatedLayer };

// Directed loan: creditor lends to debtor.
struct Edge {
    std::uint32_t creditor;
    std::uint32_t debtor;
};

struct Topology {
    int n_banks = 0;
    std::vector<Edge> edges;
    std::vector<BankClass> bank_class; // size n_banks
    std::vector<LayerTag> layer;       // size n_banks

    std::vector<int> in_degrees() const;
    std::vector<int> out_degrees() const;
    // edges / (N * (N-1))
    double denseness() const;
    int shadow_count() const;
};

struct WeightedNetwork {
    Topology topology;
    std::vector<double> weights; // aligned with topology.edges, sums to 1
    double exponent = 0.0;       // realized r of the weight law
    double realized_concentration = 0.0;

    // l_n: value of loans bank n made (out-edges)
    std::vector<double> loans_made() const;
    // b_n: value of bank n's borrowings (in-edges)
    std::vector<double> borrowings() const;
};

// Number of Shadow banks for a fraction f: round-half-up(f * N). Shared by all
// mixing structures so the f grid means the same thing everywhere.
int shadow_count_for_fraction(double shadow_fraction, int n_banks);

// Directed scale-free graph grown by preferential attachment, then adjusted by
// uniform edge additions/removals to hit exactly round(denseness * N * (N-1))
// edges. Deterministic given the seed.
Topology generate_scale_free(int n_banks, double denseness, Seed seed);

// Loan-size law w ∝ (k_creditor_in * k_debtor_out)^r for a given exponent,
// normalized to sum 1.
std::vector<double> weights_for_exponent(const Topology& topology, double exponent);

// Share of total loan value held by the five biggest lenders (all banks if N < 5).
double top5_loan_share(const Topology& topology, std::span<const double> weights);

// Finds the exponent r >= 0 by bisection so the realized top-5 share is within
// tolerance of target_concentration. Throws if the target is below the uniform
// (r=0) concentration or not reached at the r cap.
WeightedNetwork assign_weights(const Topology& topology, double target_concentration,
                               double tolerance);

// Labels round-half-up(f*N) banks Shadow, chosen uniformly at random.
Topology mix_random(const Topology& topology, double shadow_fraction, Seed seed);

// Labels the largest banks Regulated, the rest Shadow. bank_assets are the
// class-independent sizes (see balance_sheet::baseline_assets); ties broken by
// bank index, lower index ranked larger.
Topology mix_asset_correlated(const WeightedNetwork& network, double shadow_fraction,
                              std::span<const double> bank_assets);

// Two independently grown scale-free layers of n_per_layer banks (shadow layer
// first), coupled by uniformly chosen cross-layer loans until the inter-layer
// denseness reaches relative_coupling * denseness. Weights are assigned over
// the combined graph.
WeightedNetwork build_layered(int n_per_layer, double denseness, double relative_coupling,
                              double target_concentration, double tolerance, Seed seed);

} // namespace contagion
