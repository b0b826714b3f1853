#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "magsep/core.hpp"

namespace magsep {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

// Axis-aligned sampling region in (x1, x2, x3, p1, p2, p3). Coordinates with
// min_abs > 0 are drawn with |x| in [min_abs, hi] and a random sign when lo < 0.
struct SampleBox {
    Vec6 lo{-1.5, -1.5, -1.5, -1.5, -1.5, -1.5};
    Vec6 hi{1.5, 1.5, 1.5, 1.5, 1.5, 1.5};
    Vec3 min_abs{0.0, 0.0, 0.0};
};

class Sampler {
public:
    explicit Sampler(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    PhasePoint draw(const SampleBox& box);

private:
    std::mt19937_64 engine_;
};

// Admissible points for sys drawn from box; throws if the box yields none.
std::vector<PhasePoint> sample_points(const MagneticSystem& sys, const SampleBox& box, int count,
                                      std::uint64_t seed = kDefaultSeed);

}  // namespace magsep
