#pragma once

#include <cstdint>
#include <random>

namespace contagion {

using Seed = std::uint64_t;

// Stateless child-seed derivation (splitmix64 finalizer). Every sampling site
// derives its own stream from (parent, stream index), so sample i of an
// ensemble is reproducible in isolation and independent of worker scheduling.
Seed derive_seed(Seed parent, std::uint64_t stream);

// Deterministic random stream. The transforms below are pinned here rather
// than taken from std:: distributions so the generated sequences depend only
// on this code, not on the standard library version.
class RandomStream {
  public:
    explicit RandomStream(Seed seed) : engine_(seed) {}

    // [0, 1)
    double uniform();
    // (0, 1)
    double uniform_positive();
    double uniform(double lo, double hi);
    // unbiased integer in [0, n), n >= 1
    std::uint64_t uniform_index(std::uint64_t n);

    // standard normal, Marsaglia polar method
    double normal();
    // Gamma(shape, 1), Marsaglia-Tsang; shape < 1 boosted via Gamma(shape+1) * U^(1/shape)
    double gamma(double shape);
    // Student t with real dof > 0: Z / sqrt(chi2_dof / dof)
    double student_t(double dof);

  private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace contagion
