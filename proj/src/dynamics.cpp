#include "magsep/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dop853_tableau.hpp"

namespace magsep {

namespace {

namespace tab = detail::dop853;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

Vec6 rhs(const MagneticSystem& sys, const Vec6& y) {
    const Vec6 g = hamiltonian_gradient(sys, PhasePoint::from_vector(y));
    return {g[3], g[4], g[5], -g[0], -g[1], -g[2]};
}

double rms_norm(const Vec6& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / 6.0);
}

double initial_step(const MagneticSystem& sys, const Vec6& y0, const Vec6& f0, double t_end, double rtol,
                    double atol) {
    Vec6 scale{}, a{}, b{};
    for (int i = 0; i < 6; ++i) {
        scale[i] = atol + std::fabs(y0[i]) * rtol;
        a[i] = y0[i] / scale[i];
        b[i] = f0[i] / scale[i];
    }
    const double d0 = rms_norm(a);
    const double d1 = rms_norm(b);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    Vec6 y1{};
    for (int i = 0; i < 6; ++i) y1[i] = y0[i] + h0 * f0[i];
    double d2;
    try {
        const Vec6 f1 = rhs(sys, y1);
        Vec6 df{};
        for (int i = 0; i < 6; ++i) df[i] = (f1[i] - f0[i]) / scale[i];
        d2 = rms_norm(df) / h0;
    } catch (const DomainError&) {
        return std::min(h0 * 1e-3, t_end);
    }
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                   : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    return std::min({100.0 * h0, h1, t_end});
}

using Stages = std::array<Vec6, tab::kStagesExtended>;

double error_norm(const Stages& K, double h, const Vec6& scale) {
    double e5 = 0.0, e3 = 0.0;
    for (int i = 0; i < 6; ++i) {
        double s5 = 0.0, s3 = 0.0;
        for (int s = 0; s <= tab::kStages; ++s) {
            s5 += K[s][i] * tab::E5[s];
            s3 += K[s][i] * tab::E3[s];
        }
        s5 /= scale[i];
        s3 /= scale[i];
        e5 += s5 * s5;
        e3 += s3 * s3;
    }
    if (e5 == 0.0 && e3 == 0.0) return 0.0;
    const double denom = e5 + 0.01 * e3;
    return std::fabs(h) * e5 / std::sqrt(denom * 6.0);
}

Vec6 stage_state(const Vec6& y, const Stages& K, int s, double h) {
    Vec6 out = y;
    for (int i = 0; i < 6; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += tab::A[s][j] * K[j][i];
        out[i] += h * acc;
    }
    return out;
}

void validate_tolerance(double v, const char* name) {
    if (!(v >= 1e-14 && v <= 1e-3)) {
        throw std::invalid_argument(std::string(name) + " must lie in [1e-14, 1e-3]");
    }
}

}  // namespace

Vec6 DenseSegment::operator()(double t) const {
    const double x = (t - t0) / (t1 - t0);
    Vec6 y{};
    for (int i = 0; i < 7; ++i) {
        const Vec6& f = F[6 - i];
        const double w = (i % 2 == 0) ? x : 1.0 - x;
        for (int k = 0; k < 6; ++k) y[k] = (y[k] + f[k]) * w;
    }
    for (int k = 0; k < 6; ++k) y[k] += y0[k];
    return y;
}

Trajectory flow(const MagneticSystem& sys, const PhasePoint& pt0, const FlowOptions& opt) {
    validate_tolerance(opt.rel_tol, "relTol");
    validate_tolerance(opt.abs_tol, "absTol");
    if (!(opt.t_end > 0.0) || !std::isfinite(opt.t_end)) throw std::invalid_argument("tEnd must be positive");
    if (!pt0.finite()) throw DomainError("start point is not finite");
    sys.check_admissible(pt0.x);

    std::vector<double> samples = opt.sample_times;
    std::sort(samples.begin(), samples.end());
    for (double s : samples) {
        if (s < 0.0 || s > opt.t_end) throw std::invalid_argument("sample times must lie in [0, tEnd]");
    }
    const bool record_steps = samples.empty();

    Trajectory traj;
    Vec6 y = pt0.as_vector();
    double t = 0.0;
    std::size_t next = 0;
    auto record = [&](double tt, const Vec6& v) {
        if (!traj.t.empty() && tt <= traj.t.back()) return;
        traj.t.push_back(tt);
        traj.points.push_back(PhasePoint::from_vector(v));
    };
    if (record_steps) {
        record(0.0, y);
    } else {
        while (next < samples.size() && samples[next] == 0.0) {
            record(0.0, y);
            ++next;
        }
    }

    Vec6 f = rhs(sys, y);
    traj.stats.rhs_evaluations = 1;
    double h_abs = initial_step(sys, y, f, opt.t_end, opt.rel_tol, opt.abs_tol);
    ++traj.stats.rhs_evaluations;
    Stages K{};

    while (t < opt.t_end) {
        if (traj.stats.accepted >= opt.max_steps) throw StiffnessError("step budget exhausted");
        const double min_step = 10.0 * std::fabs(std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
        h_abs = std::max(h_abs, min_step);
        bool accepted = false;
        bool rejected = false;
        bool domain_hit = false;
        std::string domain_message;
        double h = 0.0, t_new = t;
        Vec6 y_new{}, f_new{};
        double err = 0.0;
        while (!accepted) {
            if (h_abs < min_step) {
                if (domain_hit) {
                    traj.truncated = true;
                    traj.diagnostic = "integration halted near the singular set at t = " + std::to_string(t) +
                                      ": " + domain_message;
                    return traj;
                }
                throw StiffnessError("step size underflow at t = " + std::to_string(t));
            }
            t_new = std::min(t + h_abs, opt.t_end);
            h = t_new - t;
            h_abs = std::fabs(h);
            try {
                K[0] = f;
                for (int s = 1; s < tab::kStages; ++s) {
                    K[s] = rhs(sys, stage_state(y, K, s, h));
                }
                y_new = y;
                for (int i = 0; i < 6; ++i) {
                    double acc = 0.0;
                    for (int s = 0; s < tab::kStages; ++s) acc += tab::B[s] * K[s][i];
                    y_new[i] += h * acc;
                }
                f_new = rhs(sys, y_new);
                traj.stats.rhs_evaluations += tab::kStages;
            } catch (const DomainError& e) {
                domain_hit = true;
                domain_message = e.what();
                h_abs *= kMinFactor;
                rejected = true;
                ++traj.stats.rejected;
                continue;
            }
            K[tab::kStages] = f_new;
            Vec6 scale{};
            for (int i = 0; i < 6; ++i) scale[i] = opt.abs_tol + std::max(std::fabs(y[i]), std::fabs(y_new[i])) * opt.rel_tol;
            err = error_norm(K, h, scale);
            if (err < 1.0) {
                double factor = err == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kErrorExponent));
                if (rejected) factor = std::min(1.0, factor);
                h_abs *= factor;
                accepted = true;
            } else {
                h_abs *= std::max(kMinFactor, kSafety * std::pow(err, kErrorExponent));
                rejected = true;
                ++traj.stats.rejected;
            }
        }
        ++traj.stats.accepted;
        traj.stats.max_error_norm = std::max(traj.stats.max_error_norm, err);

        const bool need_dense = opt.keep_dense || (next < samples.size() && samples[next] < t_new);
        if (need_dense) {
            DenseSegment seg;
            try {
                for (int s = tab::kStages + 1; s < tab::kStagesExtended; ++s) {
                    const Vec6 ys = stage_state(y, K, s, h);
                    K[s] = rhs(sys, ys);
                }
                traj.stats.rhs_evaluations += tab::kStagesExtended - tab::kStages - 1;
            } catch (const DomainError& e) {
                traj.truncated = true;
                traj.diagnostic = std::string("integration halted near the singular set: ") + e.what();
                return traj;
            }
            seg.t0 = t;
            seg.t1 = t_new;
            seg.y0 = y;
            for (int i = 0; i < 6; ++i) {
                const double dy = y_new[i] - y[i];
                seg.F[0][i] = dy;
                seg.F[1][i] = h * f[i] - dy;
                seg.F[2][i] = 2.0 * dy - h * (f_new[i] + f[i]);
                for (int r = 0; r < 4; ++r) {
                    double acc = 0.0;
                    for (int s = 0; s < tab::kStagesExtended; ++s) acc += tab::D[r][s] * K[s][i];
                    seg.F[3 + r][i] = h * acc;
                }
            }
            while (next < samples.size() && samples[next] < t_new) {
                record(samples[next], seg(samples[next]));
                ++next;
            }
            if (opt.keep_dense) traj.dense.push_back(seg);
        }
        while (next < samples.size() && samples[next] <= t_new) {
            record(samples[next], y_new);
            ++next;
        }
        t = t_new;
        y = y_new;
        f = f_new;
        if (record_steps) record(t, y);
        if (!sys.admissible(PhasePoint::from_vector(y).x)) {
            traj.truncated = true;
            traj.diagnostic = "trajectory entered the singular guard band at t = " + std::to_string(t);
            return traj;
        }
    }
    return traj;
}

Trajectory flow(const MagneticSystem& sys, const PhasePoint& pt0, double t_end, double rel_tol, double abs_tol) {
    FlowOptions o;
    o.t_end = t_end;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    return flow(sys, pt0, o);
}

double drift(const Trajectory& traj, const MomentumPolynomial& I, const MagneticSystem& sys) {
    if (traj.empty()) throw std::invalid_argument("drift needs a non-empty trajectory");
    const double i0 = I.evaluate(sys, traj.points.front());
    double worst = 0.0;
    for (const auto& pt : traj.points) {
        worst = std::max(worst, std::fabs(I.evaluate(sys, pt) - i0) / (1.0 + std::fabs(i0)));
    }
    return worst;
}

int independence_rank(const std::vector<MomentumPolynomial>& integrals, const MagneticSystem& sys,
                      const std::vector<PhasePoint>& points) {
    if (points.size() < 5) throw std::invalid_argument("independence_rank needs at least 5 admissible points");
    if (integrals.empty()) return 0;
    const int k = int(integrals.size());
    int best = 0;
    bool any_nonzero = false;
    for (const auto& pt : points) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, 6);
        for (int r = 0; r < k; ++r) {
            const Vec6 g = integrals[r].gradient(sys, pt);
            for (int c = 0; c < 6; ++c) G(r, c) = g[c];
            const double n = G.row(r).norm();
            if (n > 0.0) G.row(r) /= n;
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) == 0.0) continue;
        any_nonzero = true;
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i) {
            if (sv(i) > kRankThreshold * sv(0)) ++rank;
        }
        best = std::max(best, rank);
    }
    if (!any_nonzero) throw std::runtime_error("degenerate sample: all gradients vanish");
    return best;
}

Recurrence recurrence(const Trajectory& traj, const PhasePoint& pt0, double transient, const PhaseMask& mask) {
    if (traj.dense.empty()) throw std::invalid_argument("recurrence needs a trajectory with dense output");
    if (traj.dense.back().t1 < transient) throw std::invalid_argument("trajectory shorter than the transient");
    const Vec6 ref = pt0.as_vector();
    auto dist = [&](const DenseSegment& seg, double t) {
        const Vec6 y = seg(t);
        double s = 0.0;
        for (int i = 0; i < 6; ++i) {
            if (mask[i]) s += (y[i] - ref[i]) * (y[i] - ref[i]);
        }
        return std::sqrt(s);
    };

    struct Candidate {
        double d;
        double t;
        std::size_t seg;
    };
    constexpr int kSub = 16;
    std::vector<Candidate> grid;
    for (std::size_t s = 0; s < traj.dense.size(); ++s) {
        const auto& seg = traj.dense[s];
        if (seg.t1 <= transient) continue;
        const double a = std::max(seg.t0, transient);
        for (int k = 0; k <= kSub; ++k) {
            const double t = a + (seg.t1 - a) * k / kSub;
            grid.push_back({dist(seg, t), t, s});
        }
    }
    std::vector<Candidate> minima;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool left = i == 0 || grid[i].d <= grid[i - 1].d;
        const bool right = i + 1 == grid.size() || grid[i].d <= grid[i + 1].d;
        if (left && right) minima.push_back(grid[i]);
    }
    std::sort(minima.begin(), minima.end(), [](const Candidate& a, const Candidate& b) { return a.d < b.d; });
    if (minima.size() > 8) minima.resize(8);

    // Golden-section refinement on the interpolant around each local grid minimum.
    auto eval_at = [&](double t) {
        auto it = std::lower_bound(traj.dense.begin(), traj.dense.end(), t,
                                   [](const DenseSegment& s, double v) { return s.t1 < v; });
        if (it == traj.dense.end()) --it;
        return dist(*it, t);
    };
    Recurrence best{std::numeric_limits<double>::infinity(), 0.0};
    const double t_max = traj.dense.back().t1;
    for (const auto& c : minima) {
        const auto& seg = traj.dense[c.seg];
        const double width = (seg.t1 - std::max(seg.t0, transient)) / kSub;
        double lo = std::max(transient, c.t - width);
        double hi = std::min(t_max, c.t + width);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = eval_at(x1), f2 = eval_at(x2);
        for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = eval_at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = eval_at(x2);
            }
        }
        const double tm = 0.5 * (lo + hi);
        const double dm = std::min({eval_at(tm), c.d});
        if (dm < best.min_distance) best = {dm, dm == c.d ? c.t : tm};
    }
    return best;
}

}  // namespace magsep
