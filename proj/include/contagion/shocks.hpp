#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contagion/balance_sheet.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// N x M row-stochastic investment allocation.
struct Portfolio {
    int n_banks = 0;
    int n_assets = 0;
    std::vector<double> allocation; // row-major

    double at(int bank, int asset) const {
        return allocation[static_cast<std::size_t>(bank) * n_assets + asset];
    }
    std::span<const double> row(int bank) const {
        return {allocation.data() + static_cast<std::size_t>(bank) * n_assets,
                static_cast<std::size_t>(n_assets)};
    }
};

// Signed relative price changes of the M asset classes for one sample; -0.2
// means a 20% fall. Entries are clamped at -1 (a price cannot fall below zero).
struct PriceShock {
    std::vector<double> relative_change;
    double scale = 0.0;
    double dof = 1.5;
};

// Rows: M=1 degenerate, M=2 X1 ~ U(0,1), M>2 uniform on the simplex.
Portfolio sample_portfolio(int n_banks, int n_assets, Seed seed);

// Each entry = clamp(scale * t_dof draw). scale may be 0 (no fluctuation);
// negative scale and non-positive dof are rejected.
PriceShock sample_shock(int n_assets, double scale, double dof, Seed seed);

// Shared clamp so calibration and shock sampling use one price-floor rule.
inline double clamp_price_change(double scale, double t_draw) {
    const double v = scale * t_draw;
    return v < -1.0 ? -1.0 : v;
}

// Loss as a fraction of the invested amount: -sum_m X_m v_m.
double portfolio_loss_fraction(std::span<const double> allocation_row,
                               std::span<const double> relative_change);

// Per-bank round-0 distress: loss_n = e_n * portfolio_loss_fraction(row n, v).
std::vector<double> initial_distress(std::span<const BalanceSheet> sheets,
                                     const Portfolio& portfolio, const PriceShock& shock);

struct CalibrationSettings {
    int n_assets = 2;
    double gamma = 0.07;
    double target_p = 1e-3;
    double dof = 1.5;
    long long trials = 10'000'000;
    Seed seed = 0x5CA1E5EEDULL;
};

struct CalibrationResult {
    double scale = 0.0;
    double estimated_probability = 0.0;
    CalibrationSettings settings;
};

// Finds the amplitude s at which a standalone bank (no interbank position,
// equity ratio gamma, fresh portfolio each trial) fails with probability
// target_p. Bisection on s over common-random-number Monte Carlo estimates,
// `trials` trials per evaluation. Throws on non-convergence.
CalibrationResult calibrate_amplitude(const CalibrationSettings& settings);

// Fresh-sample estimate of the standalone failure probability at a given scale.
double standalone_failure_probability(int n_assets, double scale, double gamma, double dof,
                                      long long trials, Seed seed);

// One small text file per (M, gamma, p, dof) key under cache_dir.
struct CalibrationKey {
    int n_assets;
    double gamma;
    double target_p;
    double dof;
};
std::string calibration_cache_filename(const CalibrationKey& key);
std::optional<double> load_cached_scale(const std::string& cache_dir, const CalibrationKey& key);
void store_cached_scale(const std::string& cache_dir, const CalibrationKey& key,
                        const CalibrationResult& result);

} // namespace contagion
