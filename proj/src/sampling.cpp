#include "magsep/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magsep {

double Sampler::uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

PhasePoint Sampler::draw(const SampleBox& box) {
    Vec6 v{};
    for (int i = 0; i < 6; ++i) {
        const double m = i < 3 ? box.min_abs[i] : 0.0;
        if (m > 0.0 && box.lo[i] < 0.0) {
            const double mag = uniform(m, box.hi[i]);
            v[i] = uniform() < 0.5 ? -mag : mag;
        } else if (m > 0.0) {
            v[i] = uniform(std::max(m, box.lo[i]), box.hi[i]);
        } else {
            v[i] = uniform(box.lo[i], box.hi[i]);
        }
    }
    return PhasePoint::from_vector(v);
}

std::vector<PhasePoint> sample_points(const MagneticSystem& sys, const SampleBox& box, int count,
                                      std::uint64_t seed) {
    Sampler s(seed);
    std::vector<PhasePoint> pts;
    int attempts = 0;
    const int max_attempts = 100 * count + 1000;
    while (int(pts.size()) < count) {
        if (++attempts > max_attempts) throw std::runtime_error("sampling box yields no admissible points");
        PhasePoint p = s.draw(box);
        if (sys.admissible(p.x)) pts.push_back(p);
    }
    return pts;
}

}  // namespace magsep
