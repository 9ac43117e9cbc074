#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "contagion/shocks.hpp"
#include "t_oracle.hpp"

using namespace contagion;

TEST_CASE("single asset class means a degenerate portfolio") {
    const Portfolio p = sample_portfolio(100, 1, 1);
    for (int n = 0; n < 100; ++n) CHECK(p.at(n, 0) == 1.0);
}

TEST_CASE("portfolio rows sum to one for every asset count") {
    for (const int m : {1, 2, 3, 7}) {
        const Portfolio p = sample_portfolio(2000, m, 17);
        for (int n = 0; n < 2000; ++n) {
            double sum = 0.0;
            for (int a = 0; a < m; ++a) {
                const double x = p.at(n, a);
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
                sum += x;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    CHECK_THROWS(sample_portfolio(10, 0, 1));
}

TEST_CASE("two-asset allocation is uniform") {
    const int rows = 100000;
    const Portfolio p = sample_portfolio(rows, 2, 23);
    double mean = 0.0;
    for (int n = 0; n < rows; ++n) mean += p.at(n, 0);
    mean /= rows;
    CHECK(mean >= 0.49);
    CHECK(mean <= 0.51);
}

TEST_CASE("three-asset allocation is symmetric on the simplex") {
    const int rows = 100000;
    const Portfolio p = sample_portfolio(rows, 3, 29);
    for (int a = 0; a < 3; ++a) {
        double mean = 0.0;
        for (int n = 0; n < rows; ++n) mean += p.at(n, a);
        mean /= rows;
        CHECK(mean == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    }
}

TEST_CASE("vanishing scale gives a vanishing shock") {
    const PriceShock zero = sample_shock(4, 0.0, 1.5, 3);
    for (const double v : zero.relative_change) CHECK(v == 0.0);
    const PriceShock tiny = sample_shock(4, 1e-300, 1.5, 3);
    for (const double v : tiny.relative_change) CHECK(std::abs(v) < 1e-290);
    CHECK_THROWS(sample_shock(4, -0.1, 1.5, 3));
    CHECK_THROWS(sample_shock(4, 0.1, 0.0, 3));
    CHECK_THROWS(sample_shock(0, 0.1, 1.5, 3));
}

TEST_CASE("shock entries: sign symmetry and median scale") {
    const double scale = 0.1;
    const double dof = 1.5;
    const long long draws = 1000000;
    std::vector<double> magnitudes;
    magnitudes.reserve(draws);
    long long positive = 0;
    for (long long i = 0; i < draws / 4; ++i) {
        const PriceShock s = sample_shock(4, scale, dof, derive_seed(1000, static_cast<Seed>(i)));
        for (const double v : s.relative_change) {
            REQUIRE(v >= -1.0);
            if (v > 0.0) ++positive;
            magnitudes.push_back(std::abs(v));
        }
    }
    const double positive_fraction = static_cast<double>(positive) / draws;
    CHECK(positive_fraction >= 0.498);
    CHECK(positive_fraction <= 0.502);

    // median |entry| = scale * Q_t(0.75); the oracle gives 0.8725946625 at dof 1.5
    std::nth_element(magnitudes.begin(), magnitudes.begin() + draws / 2, magnitudes.end());
    const double median = magnitudes[draws / 2];
    const double oracle_median = scale * t_quantile(dof, 0.75);
    CHECK(oracle_median == doctest::Approx(scale * 0.8725946625).epsilon(1e-6));
    CHECK(median == doctest::Approx(oracle_median).epsilon(0.02));
}

TEST_CASE("shock tail decays like the t power law") {
    // scale small enough that the -1 floor stays out of the 10s window
    const double scale = 0.001;
    const double dof = 1.5;
    const long long draws = 1000000;
    long long above_5s = 0;
    long long above_10s = 0;
    for (long long i = 0; i < draws / 4; ++i) {
        const PriceShock s = sample_shock(4, scale, dof, derive_seed(2000, static_cast<Seed>(i)));
        for (const double v : s.relative_change) {
            const double mag = std::abs(v);
            if (mag > 5.0 * scale) ++above_5s;
            if (mag > 10.0 * scale) ++above_10s;
        }
    }
    const double exponent = std::log(static_cast<double>(above_5s) / above_10s) / std::log(2.0);
    // oracle value of the same ratio for the exact t distribution
    const double oracle_exponent =
        std::log((1.0 - t_cdf(dof, 5.0)) / (1.0 - t_cdf(dof, 10.0))) / std::log(2.0);
    CHECK(oracle_exponent == doctest::Approx(dof).epsilon(0.2));
    CHECK(exponent == doctest::Approx(oracle_exponent).epsilon(0.1));
}

TEST_CASE("price falls are floored at a total loss") {
    const PriceShock s = sample_shock(2000, 20.0, 1.5, 13);
    long long floored = 0;
    for (const double v : s.relative_change) {
        REQUIRE(v >= -1.0);
        if (v == -1.0) ++floored;
    }
    CHECK(floored > 0);
}

TEST_CASE("loss expression shared with the cascade round 0") {
    const Portfolio p = sample_portfolio(3, 2, 5);
    const PriceShock s = sample_shock(2, 0.2, 1.5, 7);
    std::vector<BalanceSheet> sheets(3);
    sheets[0].external_assets = 1.0;
    sheets[1].external_assets = 2.5;
    sheets[2].external_assets = 0.0;
    const std::vector<double> losses = initial_distress(sheets, p, s);
    for (int n = 0; n < 3; ++n) {
        const double expected = -sheets[static_cast<std::size_t>(n)].external_assets *
                                (p.at(n, 0) * s.relative_change[0] + p.at(n, 1) * s.relative_change[1]);
        CHECK(losses[static_cast<std::size_t>(n)] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("calibration matches the closed form for a single asset class") {
    CalibrationSettings settings;
    settings.n_assets = 1;
    settings.gamma = 0.07;
    settings.target_p = 1e-3;
    settings.dof = 1.5;
    settings.trials = 2'000'000;
    settings.seed = 4001;
    const CalibrationResult result = calibrate_amplitude(settings);
    const double closed_form = 0.07 / t_quantile(1.5, 1.0 - 1e-3);
    CHECK(result.scale == doctest::Approx(closed_form).epsilon(0.05));
    CHECK(result.estimated_probability == doctest::Approx(1e-3).epsilon(0.2));
}

TEST_CASE("calibration is deterministic and the two-asset scale verifies") {
    CalibrationSettings settings;
    settings.n_assets = 2;
    settings.trials = 2'000'000;
    settings.seed = 4003;
    const CalibrationResult a = calibrate_amplitude(settings);
    const CalibrationResult b = calibrate_amplitude(settings);
    CHECK(a.scale == b.scale);

    const double fresh =
        standalone_failure_probability(2, a.scale, settings.gamma, settings.dof, 2'000'000, 9999);
    CHECK(fresh >= 0.4e-3);
    CHECK(fresh <= 2.5e-3);
}

TEST_CASE("degenerate calibration targets are rejected") {
    CalibrationSettings settings;
    settings.target_p = 0.5;
    CHECK_THROWS(calibrate_amplitude(settings));
    settings.target_p = 0.6;
    CHECK_THROWS(calibrate_amplitude(settings));
    settings.target_p = 1e-3;
    settings.gamma = 0.0;
    CHECK_THROWS(calibrate_amplitude(settings));
    settings.gamma = 0.07;
    settings.n_assets = 0;
    CHECK_THROWS(calibrate_amplitude(settings));
}

TEST_CASE("calibration cache round trip") {
    const CalibrationKey key{2, 0.07, 1e-3, 1.5};
    const std::string dir = "./.test-cache";
    CalibrationResult result;
    result.scale = 0.00123456;
    result.settings = CalibrationSettings{};
    store_cached_scale(dir, key, result);
    const auto loaded = load_cached_scale(dir, key);
    REQUIRE(loaded.has_value());
    CHECK(*loaded == doctest::Approx(0.00123456).epsilon(1e-15));
    const CalibrationKey other{3, 0.07, 1e-3, 1.5};
    CHECK_FALSE(load_cached_scale(dir, other).has_value());
}
