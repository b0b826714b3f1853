#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "magsep/polynomial.hpp"

namespace magsep {

class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FlowOptions {
    double t_end = 100.0;
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    // Output times in [0, t_end]; when empty every accepted step is recorded.
    std::vector<double> sample_times;
    bool keep_dense = false;
    long max_steps = 20'000'000;
};

// Seventh-degree continuous extension of one DOP853 step.
struct DenseSegment {
    double t0 = 0.0;
    double t1 = 0.0;
    Vec6 y0{};
    std::array<Vec6, 7> F{};

    Vec6 operator()(double t) const;
};

struct FlowStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
    double max_error_norm = 0.0;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<PhasePoint> points;
    std::vector<DenseSegment> dense;
    FlowStats stats;
    bool truncated = false;
    std::string diagnostic;

    bool empty() const { return t.empty(); }
    std::size_t size() const { return t.size(); }
};

// Hamilton's equations dx/dt = dH/dp, dp/dt = -dH/dx integrated with DOP853.
Trajectory flow(const MagneticSystem& sys, const PhasePoint& pt0, const FlowOptions& options);
Trajectory flow(const MagneticSystem& sys, const PhasePoint& pt0, double t_end, double rel_tol, double abs_tol);

double drift(const Trajectory& traj, const MomentumPolynomial& I, const MagneticSystem& sys);

inline constexpr double kRankThreshold = 1e-6;

int independence_rank(const std::vector<MomentumPolynomial>& integrals, const MagneticSystem& sys,
                      const std::vector<PhasePoint>& points);

struct Recurrence {
    double min_distance = 0.0;
    double t_at_min = 0.0;
};

using PhaseMask = std::array<bool, 6>;
inline constexpr PhaseMask kFullPhaseMask{true, true, true, true, true, true};

// Closest return to pt0 after the transient, located on the dense output.
Recurrence recurrence(const Trajectory& traj, const PhasePoint& pt0, double transient = 1.0,
                      const PhaseMask& mask = kFullPhaseMask);

}  // namespace magsep
