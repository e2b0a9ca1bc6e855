// sphkep/sampling.hpp
#pragma once

#include <cstdint>
#include <random>

namespace sphkep {

/// Seeded uniform sampler. The mapping from raw 64-bit draws to doubles is
/// pinned here instead of relying on std::uniform_real_distribution, so that
/// a given seed reproduces the same sequence on every standard library.
class UniformSampler {
public:
    explicit UniformSampler(std::uint64_t seed) : eng_(seed) {}

    /// Uniform draw in [lo, hi).
    [[nodiscard]] double uniform(double lo, double hi)
    {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    [[nodiscard]] std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace sphkep
