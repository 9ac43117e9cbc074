#include "contagion/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace contagion {

namespace {

std::uint64_t splitmix64_final(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

Seed derive_seed(Seed parent, std::uint64_t stream) {
    std::uint64_t x = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x = splitmix64_final(x);
    x = splitmix64_final(x + 0x9E3779B97F4A7C15ULL);
    return x;
}

double RandomStream::uniform() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_positive() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_positive(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_positive();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RandomStream::student_t(double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("student_t: dof must be > 0");
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * dof);
    return z * std::sqrt(dof / chi2);
}

} // namespace contagion
