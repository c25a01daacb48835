#pragma once

#include <cstdint>
#include <random>

namespace hcap {

/// Seeded generator with hand-rolled uniform draws so that identical seeds
/// give identical streams on every platform (std::uniform_real_distribution
/// is implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}

    double uniform01() { return (g_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform point in the disc of `radius` around the origin.
    std::pair<double, double> in_disc(double radius) {
        for (;;) {
            double x = uniform(-radius, radius), y = uniform(-radius, radius);
            if (x * x + y * y <= radius * radius) return {x, y};
        }
    }

  private:
    std::mt19937_64 g_;
};

}  // namespace hcap
