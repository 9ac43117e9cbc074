#include "contagion/shocks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace contagion {

namespace {

constexpr long long kTrialBlock = 1 << 16;

void sample_allocation_row(RandomStream& rng, int n_assets, double* row) {
    if (n_assets == 1) {
        row[0] = 1.0;
        return;
    }
    if (n_assets == 2) {
        row[0] = rng.uniform();
        row[1] = 1.0 - row[0];
        return;
    }
    // uniform on the simplex: normalized standard exponentials
    double total = 0.0;
    for (int m = 0; m < n_assets; ++m) {
        row[m] = -std::log(rng.uniform_positive());
        total += row[m];
    }
    for (int m = 0; m < n_assets; ++m) row[m] /= total;
}

} // namespace

Portfolio sample_portfolio(int n_banks, int n_assets, Seed seed) {
    if (n_assets < 1) throw std::invalid_argument("sample_portfolio: need at least one asset class");
    if (n_banks < 1) throw std::invalid_argument("sample_portfolio: need at least one bank");
    Portfolio p;
    p.n_banks = n_banks;
    p.n_assets = n_assets;
    p.allocation.resize(static_cast<std::size_t>(n_banks) * n_assets);
    RandomStream rng(seed);
    for (int n = 0; n < n_banks; ++n)
        sample_allocation_row(rng, n_assets, p.allocation.data() + static_cast<std::size_t>(n) * n_assets);
    return p;
}

PriceShock sample_shock(int n_assets, double scale, double dof, Seed seed) {
    if (n_assets < 1) throw std::invalid_argument("sample_shock: need at least one asset class");
    if (scale < 0.0) throw std::invalid_argument("sample_shock: scale must be >= 0");
    if (!(dof > 0.0)) throw std::invalid_argument("sample_shock: dof must be > 0");
    PriceShock shock;
    shock.scale = scale;
    shock.dof = dof;
    shock.relative_change.resize(static_cast<std::size_t>(n_assets));
    RandomStream rng(seed);
    for (double& v : shock.relative_change) v = clamp_price_change(scale, rng.student_t(dof));
    return shock;
}

double portfolio_loss_fraction(std::span<const double> allocation_row,
                               std::span<const double> relative_change) {
    double gain = 0.0;
    for (std::size_t m = 0; m < allocation_row.size(); ++m)
        gain += allocation_row[m] * relative_change[m];
    return -gain;
}

std::vector<double> initial_distress(std::span<const BalanceSheet> sheets,
                                     const Portfolio& portfolio, const PriceShock& shock) {
    if (static_cast<int>(sheets.size()) != portfolio.n_banks)
        throw std::invalid_argument("initial_distress: sheet/portfolio size mismatch");
    if (static_cast<int>(shock.relative_change.size()) != portfolio.n_assets)
        throw std::invalid_argument("initial_distress: shock dimension mismatch");
    std::vector<double> losses(sheets.size());
    for (std::size_t n = 0; n < sheets.size(); ++n)
        losses[n] = sheets[n].external_assets *
                    portfolio_loss_fraction(portfolio.row(static_cast<int>(n)), shock.relative_change);
    return losses;
}

namespace {

struct TrialDraw {
    // one standalone-bank trial: fresh allocation row and raw t draws
    void sample(RandomStream& rng, int n_assets, std::vector<double>& x, std::vector<double>& t) {
        sample_allocation_row(rng, n_assets, x.data());
        for (int m = 0; m < n_assets; ++m) t[m] = rng.student_t(dof);
    }
    double dof;
};

double standalone_loss(std::span<const double> x, std::span<const double> t, double scale) {
    double loss = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) loss -= x[m] * clamp_price_change(scale, t[m]);
    return loss;
}

void validate(const CalibrationSettings& s) {
    if (s.n_assets < 1) throw std::invalid_argument("calibrate: need at least one asset class");
    if (!(s.gamma > 0.0) || !(s.gamma < 1.0))
        throw std::invalid_argument("calibrate: gamma must lie in (0,1)");
    if (!(s.target_p > 0.0) || !(s.target_p < 0.5))
        throw std::invalid_argument("calibrate: target probability must lie in (0, 0.5)");
    if (!(s.dof > 0.0)) throw std::invalid_argument("calibrate: dof must be > 0");
    if (s.trials < 1000) throw std::invalid_argument("calibrate: need at least 1000 trials");
}

} // namespace

CalibrationResult calibrate_amplitude(const CalibrationSettings& settings) {
    validate(settings);
    const int m_assets = settings.n_assets;
    const double gamma = settings.gamma;
    const double p = settings.target_p;

    std::vector<double> x(static_cast<std::size_t>(m_assets));
    std::vector<double> t(static_cast<std::size_t>(m_assets));
    TrialDraw draw{settings.dof};

    // rough bracket from the unclamped unit-scale loss quantile
    const long long probe_trials = std::min<long long>(settings.trials, 200'000);
    std::vector<double> unit_losses;
    unit_losses.reserve(static_cast<std::size_t>(probe_trials));
    {
        RandomStream rng(derive_seed(settings.seed, 0xB0B));
        for (long long i = 0; i < probe_trials; ++i) {
            draw.sample(rng, m_assets, x, t);
            double u = 0.0;
            for (int m = 0; m < m_assets; ++m) u -= x[m] * t[m];
            unit_losses.push_back(u);
        }
    }
    auto rank = static_cast<long long>(std::ceil((1.0 - p) * static_cast<double>(probe_trials))) - 1;
    rank = std::clamp<long long>(rank, 0, probe_trials - 1);
    std::nth_element(unit_losses.begin(), unit_losses.begin() + rank, unit_losses.end());
    const double rough_quantile = unit_losses[static_cast<std::size_t>(rank)];
    double rough_scale = rough_quantile > 0.0 ? gamma / rough_quantile : gamma;

    constexpr int kMaxBracketAttempts = 4;
    constexpr double kBracketFactor = 6.0;
    double widen = 1.0;
    for (int attempt = 0; attempt < kMaxBracketAttempts; ++attempt, widen *= 4.0) {
        const double s_lo = rough_scale / (kBracketFactor * widen);
        const double s_hi = rough_scale * (kBracketFactor * widen);

        // one full pass; keep only trials that could fail somewhere in the
        // bracket (upper-bounds the clamped loss at s_hi, gains dropped)
        std::vector<double> kept_x;
        std::vector<double> kept_t;
        const long long n_blocks = (settings.trials + kTrialBlock - 1) / kTrialBlock;
        for (long long block = 0; block < n_blocks; ++block) {
            RandomStream rng(derive_seed(settings.seed, 0xCA11B + static_cast<std::uint64_t>(block)));
            const long long begin = block * kTrialBlock;
            const long long end = std::min(settings.trials, begin + kTrialBlock);
            for (long long i = begin; i < end; ++i) {
                draw.sample(rng, m_assets, x, t);
                double upper = 0.0;
                for (int m = 0; m < m_assets; ++m)
                    if (t[m] < 0.0) upper += x[m] * std::min(-s_hi * t[m], 1.0);
                if (upper > gamma) {
                    kept_x.insert(kept_x.end(), x.begin(), x.end());
                    kept_t.insert(kept_t.end(), t.begin(), t.end());
                }
            }
        }
        const auto n_kept = static_cast<long long>(kept_t.size()) / m_assets;
        auto failures_at = [&](double s) {
            long long count = 0;
            for (long long i = 0; i < n_kept; ++i) {
                const std::size_t off = static_cast<std::size_t>(i) * m_assets;
                const std::span<const double> xi(kept_x.data() + off, static_cast<std::size_t>(m_assets));
                const std::span<const double> ti(kept_t.data() + off, static_cast<std::size_t>(m_assets));
                if (standalone_loss(xi, ti, s) > gamma) ++count;
            }
            return static_cast<double>(count) / static_cast<double>(settings.trials);
        };

        if (failures_at(s_lo) > p || failures_at(s_hi) < p) continue; // widen and retry

        double lo = s_lo;
        double hi = s_hi;
        for (int iter = 0; iter < 80 && (hi - lo) > 1e-9 * hi; ++iter) {
            const double mid = std::sqrt(lo * hi);
            if (failures_at(mid) >= p)
                hi = mid;
            else
                lo = mid;
        }
        CalibrationResult result;
        result.scale = hi;
        result.estimated_probability = failures_at(hi);
        result.settings = settings;
        return result;
    }
    throw std::runtime_error("calibrate_amplitude: bracket search failed after 4 widening "
                             "attempts; target probability not attainable");
}

double standalone_failure_probability(int n_assets, double scale, double gamma, double dof,
                                      long long trials, Seed seed) {
    if (n_assets < 1) throw std::invalid_argument("need at least one asset class");
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    std::vector<double> x(static_cast<std::size_t>(n_assets));
    std::vector<double> t(static_cast<std::size_t>(n_assets));
    TrialDraw draw{dof};
    long long count = 0;
    const long long n_blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    for (long long block = 0; block < n_blocks; ++block) {
        RandomStream rng(derive_seed(seed, 0xF4E5A + static_cast<std::uint64_t>(block)));
        const long long begin = block * kTrialBlock;
        const long long end = std::min(trials, begin + kTrialBlock);
        for (long long i = begin; i < end; ++i) {
            draw.sample(rng, n_assets, x, t);
            if (standalone_loss(x, t, scale) > gamma) ++count;
        }
    }
    return static_cast<double>(count) / static_cast<double>(trials);
}

std::string calibration_cache_filename(const CalibrationKey& key) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "calib_M%d_g%.12g_p%.12g_mu%.12g.txt", key.n_assets, key.gamma,
                  key.target_p, key.dof);
    return buf;
}

std::optional<double> load_cached_scale(const std::string& cache_dir, const CalibrationKey& key) {
    const std::filesystem::path path = std::filesystem::path(cache_dir) / calibration_cache_filename(key);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
            return std::stod(line);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

void store_cached_scale(const std::string& cache_dir, const CalibrationKey& key,
                        const CalibrationResult& result) {
    std::filesystem::create_directories(cache_dir);
    const std::filesystem::path path = std::filesystem::path(cache_dir) / calibration_cache_filename(key);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write calibration cache file: " + path.string());
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "# shock amplitude for M=%d gamma=%.12g p=%.12g dof=%.12g (%lld trials, seed %llu)\n"
                  "%.17g\n",
                  key.n_assets, key.gamma, key.target_p, key.dof,
                  static_cast<long long>(result.settings.trials),
                  static_cast<unsigned long long>(result.settings.seed), result.scale);
    out << buf;
}

} // namespace contagion
