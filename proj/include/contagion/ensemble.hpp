#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "contagion/balance_sheet.hpp"
#include "contagion/cascade.hpp"
#include "contagion/network.hpp"
#include "contagion/shocks.hpp"

namespace contagion {

enum class TopologyKind { RandomMixing, AssetCorrelated, Layered };

struct ExperimentConfig {
    TopologyKind kind = TopologyKind::RandomMixing;
    // curve-(b) variant: rebuild every sample with the uniform average equity ratio
    bool homogeneous_gamma = false;
    int n_banks = 500; // per layer when kind == Layered
    int n_assets = 2;
    SystemParams params;
    double denseness = 0.05;
    double concentration = 0.25;
    double concentration_tolerance = 0.02;
    // shadow fraction f (mixing kinds) or relative coupling q (layered)
    double mix_value = 0.5;
    int samples = 1000;
    Seed master_seed = 1;
    double shock_scale = -1.0; // set explicitly or from calibration before running
    double shock_dof = 1.5;
    int workers = 0; // 0 = hardware concurrency

    int total_banks() const { return kind == TopologyKind::Layered ? 2 * n_banks : n_banks; }
    void validate() const;
};

struct SampleOutcome {
    int total = 0;
    int shadow = 0;
    int regulated = 0;
};

struct EnsembleResult {
    std::vector<SampleOutcome> outcomes; // by sample index
    std::map<int, long long> histogram;  // empirical P(F) as counts
    int crisis_total = 0;
    int crisis_shadow = 0;
    int crisis_regulated = 0;
    long long samples_run = 0;
    int total_banks = 0;
};

// 999th 1000-quantile: sorted ascending, element at index ceil(0.999*S)-1
// (exact integer arithmetic).
int quantile_999(std::span<const int> values);

// Everything one sample regenerates, exposed for the export subcommands.
struct SampleSystem {
    WeightedNetwork network;
    std::vector<BalanceSheet> sheets;
    Portfolio portfolio;
    PriceShock shock;
    double gamma_bar = 0.0; // average equity ratio of the heterogeneous sheets
};
SampleSystem build_sample(const ExperimentConfig& config, long long sample_index);

EnsembleResult run_ensemble(const ExperimentConfig& config);

struct SweepPoint {
    double value = 0.0;
    int crisis_total = 0;
    int crisis_shadow = 0;
    int crisis_regulated = 0;
    std::optional<int> homogeneous_total;  // curve (b), f sweeps
    std::optional<double> linear_baseline; // curve (c) = F(0) + f*N, f sweeps
    std::optional<double> r_total;         // R(q), q sweeps; empty when F(0)=0
    std::optional<double> r_shadow;
    std::optional<double> r_regulated;
    std::map<int, long long> histogram;
};

enum class SweepVariable { ShadowFraction, LayerCoupling };

struct SweepResult {
    SweepVariable variable = SweepVariable::ShadowFraction;
    int total_banks = 0;
    std::vector<SweepPoint> points;
};

// Heterogeneous curve (a), homogeneous-average-gamma curve (b) on identical
// per-sample draws, and the line F(0) + f*N as curve (c).
SweepResult sweep_f(const ExperimentConfig& base, std::span<const double> grid);

// R(q) = (F(q) - F(0)) / F(0) for the total and per-layer crisis counts.
// The grid must include q = 0.
SweepResult sweep_q(const ExperimentConfig& base, std::span<const double> grid);

} // namespace contagion
