#include "contagion/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace contagion {

void ExperimentConfig::validate() const {
    params.validate();
    if (n_banks < 2) throw std::invalid_argument("config: need at least 2 banks");
    if (n_assets < 1) throw std::invalid_argument("config: need at least one asset class");
    if (samples < 1) throw std::invalid_argument("config: need at least one sample");
    if (mix_value < 0.0 || mix_value > 1.0)
        throw std::invalid_argument("config: f/q value must lie in [0,1]");
    if (shock_scale < 0.0)
        throw std::invalid_argument("config: shock scale not set (calibrate or pass a value)");
    if (!(shock_dof > 0.0)) throw std::invalid_argument("config: shock dof must be > 0");
    if (!(denseness > 0.0) || denseness > 1.0)
        throw std::invalid_argument("config: denseness must lie in (0,1]");
}

int quantile_999(std::span<const int> values) {
    if (values.empty()) throw std::invalid_argument("quantile_999: empty sample list");
    std::vector<int> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const long long s = static_cast<long long>(sorted.size());
    const long long index = (999 * s + 999) / 1000 - 1; // ceil(0.999*S) - 1, exact
    return sorted[static_cast<std::size_t>(index)];
}

SampleSystem build_sample(const ExperimentConfig& config, long long sample_index) {
    const Seed sample_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(sample_index));
    const Seed topology_seed = derive_seed(sample_seed, 0);
    const Seed mixing_seed = derive_seed(sample_seed, 1);
    const Seed portfolio_seed = derive_seed(sample_seed, 2);
    const Seed shock_seed = derive_seed(sample_seed, 3);

    SampleSystem sys;
    switch (config.kind) {
        case TopologyKind::RandomMixing: {
            Topology topo = generate_scale_free(config.n_banks, config.denseness, topology_seed);
            topo = mix_random(topo, config.mix_value, mixing_seed);
            sys.network = assign_weights(topo, config.concentration, config.concentration_tolerance);
            break;
        }
        case TopologyKind::AssetCorrelated: {
            const Topology topo = generate_scale_free(config.n_banks, config.denseness, topology_seed);
            sys.network = assign_weights(topo, config.concentration, config.concentration_tolerance);
            const std::vector<double> assets =
                baseline_assets(sys.network, config.params.interbank_ratio);
            sys.network.topology = mix_asset_correlated(sys.network, config.mix_value, assets);
            break;
        }
        case TopologyKind::Layered: {
            sys.network = build_layered(config.n_banks, config.denseness, config.mix_value,
                                        config.concentration, config.concentration_tolerance,
                                        topology_seed);
            break;
        }
    }

    SynthesisResult synthesis = synthesize(sys.network, config.params);
    sys.gamma_bar = average_gamma(synthesis.sheets);
    sys.sheets = config.homogeneous_gamma ? homogenize(synthesis.sheets, sys.gamma_bar)
                                          : std::move(synthesis.sheets);
    sys.portfolio = sample_portfolio(config.total_banks(), config.n_assets, portfolio_seed);
    sys.shock = sample_shock(config.n_assets, config.shock_scale, config.shock_dof, shock_seed);
    return sys;
}

namespace {

SampleOutcome run_one_sample(const ExperimentConfig& config, long long sample_index) {
    const SampleSystem sys = build_sample(config, sample_index);
    const CascadeOutcome outcome = run_cascade(sys.sheets, sys.network, sys.portfolio, sys.shock);
    return {outcome.total_failed, outcome.shadow_failed, outcome.regulated_failed};
}

} // namespace

EnsembleResult run_ensemble(const ExperimentConfig& config) {
    config.validate();
    const long long n_samples = config.samples;

    EnsembleResult result;
    result.outcomes.resize(static_cast<std::size_t>(n_samples));
    result.samples_run = n_samples;
    result.total_banks = config.total_banks();

    int workers = config.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    workers = static_cast<int>(std::min<long long>(workers, n_samples));

    std::atomic<long long> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker_loop = [&]() {
        for (;;) {
            const long long i = cursor.fetch_add(1);
            if (i >= n_samples) return;
            try {
                result.outcomes[static_cast<std::size_t>(i)] = run_one_sample(config, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                cursor.store(n_samples);
                return;
            }
        }
    };
    if (workers == 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<int> totals;
    totals.reserve(static_cast<std::size_t>(n_samples));
    for (const SampleOutcome& o : result.outcomes) {
        ++result.histogram[o.total];
        totals.push_back(o.total);
    }
    result.crisis_total = quantile_999(totals);
    // per-class counts come from the sample that realizes the total quantile,
    // ties broken toward the larger shadow count
    const SampleOutcome* chosen = nullptr;
    for (const SampleOutcome& o : result.outcomes) {
        if (o.total != result.crisis_total) continue;
        if (!chosen || o.shadow > chosen->shadow) chosen = &o;
    }
    result.crisis_shadow = chosen->shadow;
    result.crisis_regulated = chosen->regulated;
    return result;
}

SweepResult sweep_f(const ExperimentConfig& base, std::span<const double> grid) {
    if (base.kind == TopologyKind::Layered)
        throw std::invalid_argument("sweep_f: topology must be a mixing kind, not layered");
    SweepResult sweep;
    sweep.variable = SweepVariable::ShadowFraction;
    sweep.total_banks = base.total_banks();

    std::optional<int> f0_crisis;
    std::vector<SweepPoint> points;
    points.reserve(grid.size());
    for (const double f : grid) {
        ExperimentConfig het = base;
        het.mix_value = f;
        het.homogeneous_gamma = false;
        const EnsembleResult a = run_ensemble(het);

        ExperimentConfig hom = het;
        hom.homogeneous_gamma = true;
        const EnsembleResult b = run_ensemble(hom);

        SweepPoint point;
        point.value = f;
        point.crisis_total = a.crisis_total;
        point.crisis_shadow = a.crisis_shadow;
        point.crisis_regulated = a.crisis_regulated;
        point.homogeneous_total = b.crisis_total;
        point.histogram = a.histogram;
        if (f == 0.0) f0_crisis = a.crisis_total;
        points.push_back(std::move(point));
    }
    if (!f0_crisis) {
        ExperimentConfig zero = base;
        zero.mix_value = 0.0;
        zero.homogeneous_gamma = false;
        f0_crisis = run_ensemble(zero).crisis_total;
    }
    for (SweepPoint& point : points)
        point.linear_baseline = static_cast<double>(*f0_crisis) + point.value * sweep.total_banks;
    sweep.points = std::move(points);
    return sweep;
}

SweepResult sweep_q(const ExperimentConfig& base, std::span<const double> grid) {
    if (base.kind != TopologyKind::Layered)
        throw std::invalid_argument("sweep_q: topology must be layered");
    if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
        throw std::invalid_argument("sweep_q: grid must include q = 0");

    SweepResult sweep;
    sweep.variable = SweepVariable::LayerCoupling;
    sweep.total_banks = base.total_banks();

    std::optional<SampleOutcome> at_zero;
    for (const double q : grid) {
        ExperimentConfig config = base;
        config.mix_value = q;
        config.homogeneous_gamma = false;
        const EnsembleResult r = run_ensemble(config);
        SweepPoint point;
        point.value = q;
        point.crisis_total = r.crisis_total;
        point.crisis_shadow = r.crisis_shadow;
        point.crisis_regulated = r.crisis_regulated;
        point.histogram = r.histogram;
        if (q == 0.0)
            at_zero = SampleOutcome{r.crisis_total, r.crisis_shadow, r.crisis_regulated};
        sweep.points.push_back(std::move(point));
    }
    auto ratio = [](int fq, int f0) -> std::optional<double> {
        if (f0 == 0) return std::nullopt; // undefined, reported as such
        return (static_cast<double>(fq) - f0) / f0;
    };
    for (SweepPoint& point : sweep.points) {
        point.r_total = ratio(point.crisis_total, at_zero->total);
        point.r_shadow = ratio(point.crisis_shadow, at_zero->shadow);
        point.r_regulated = ratio(point.crisis_regulated, at_zero->regulated);
    }
    return sweep;
}

} // namespace contagion
