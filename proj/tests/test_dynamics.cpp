#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magsep/catalog.hpp"
#include "magsep/dynamics.hpp"
#include "magsep/sampling.hpp"

using namespace magsep;
using MP = MomentumPolynomial;

namespace {

PhasePoint first_start(const catalog::Instance& inst, std::uint64_t seed = kDefaultSeed) {
    return sample_points(inst.system, inst.start_box, 1, seed).front();
}

Trajectory dense_flow(const MagneticSystem& sys, const PhasePoint& pt0, double t_end) {
    FlowOptions o;
    o.t_end = t_end;
    o.keep_dense = true;
    return flow(sys, pt0, o);
}

Recurrence caged_recurrence(double ell, double m, double c, double periods) {
    const auto inst = catalog::instantiate("const.cagedosc", {{"ell", ell}, {"m", m}, {"c", c}});
    const PhasePoint pt0 = first_start(inst);
    const double window = periods * std::stod(inst.meta("shortest_period"));
    return recurrence(dense_flow(inst.system, pt0, window + 1.0), pt0, 1.0);
}

}  // namespace

TEST(Flow, FreeMotionIsLinear) {
    const PhasePoint pt0{{0.1, -0.2, 0.3}, {1.0, -0.5, 0.25}};
    FlowOptions o;
    o.t_end = 10.0;
    o.sample_times = {0.0, 1.0, 5.0, 10.0};
    const auto tr = flow(MagneticSystem{}, pt0, o);
    ASSERT_EQ(tr.size(), 4u);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(tr.points[k].x[i], pt0.x[i] + pt0.p[i] * tr.t[k], 1e-12 * (1 + std::fabs(tr.points[k].x[i])));
            EXPECT_EQ(tr.points[k].p[i], pt0.p[i]);
        }
    }
}

TEST(Flow, CyclotronPeriodInConstantField) {
    const auto inst = catalog::instantiate("const.uniformB", {{"gamma", 2}, {"v1", 0}, {"v4", 0}});
    const PhasePoint pt0{{0.3, 0.2, 0.1}, {1, 0, 0}};
    FlowOptions o;
    o.t_end = std::numbers::pi;
    o.sample_times = {std::numbers::pi};
    const auto tr = flow(inst.system, pt0, o);
    EXPECT_NEAR(tr.points.back().p[0], 1.0, 1e-8);
    EXPECT_NEAR(tr.points.back().p[2], 0.0, 1e-8);
    EXPECT_NEAR(tr.points.back().x[0], pt0.x[0], 1e-8);
    EXPECT_NEAR(tr.points.back().x[2], pt0.x[2], 1e-8);
}

TEST(Flow, EnergyDriftOnFamilyE1) {
    const auto inst = catalog::instantiate("case1.b");
    const auto tr = flow(inst.system, first_start(inst), 100.0, 1e-12, 1e-12);
    ASSERT_FALSE(tr.truncated) << tr.diagnostic;
    EXPECT_LE(drift(tr, MP::hamiltonian(inst.system), inst.system), 1e-8);
}

TEST(Flow, TimesStrictlyIncreaseAndStatsRecorded) {
    const auto inst = catalog::instantiate("case2.c");
    const auto tr = flow(inst.system, first_start(inst), 20.0, 1e-10, 1e-10);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LT(tr.t[k - 1], tr.t[k]);
    EXPECT_GT(tr.stats.accepted, 0);
    EXPECT_GT(tr.stats.rhs_evaluations, tr.stats.accepted);
    EXPECT_LE(tr.stats.max_error_norm, 1.0);
}

TEST(Flow, SingularApproachTruncates) {
    const MagneticSystem fall(GaugePotential{}, Field::on_axis(ScalarFunction1D::monomial(-1.0, -1), 0));
    const auto tr = flow(fall, PhasePoint{{0.5, 0, 0}, {0, 0, 0}}, 10.0, 1e-10, 1e-10);
    EXPECT_TRUE(tr.truncated);
    EXPECT_FALSE(tr.diagnostic.empty());
    for (const auto& pt : tr.points) EXPECT_TRUE(fall.admissible(pt.x));
}

TEST(Flow, RejectsToleranceOutsideRange) {
    EXPECT_THROW(flow(MagneticSystem{}, PhasePoint{}, 1.0, 1e-2, 1e-12), std::invalid_argument);
    EXPECT_THROW(flow(MagneticSystem{}, PhasePoint{}, 1.0, 1e-12, 1e-15), std::invalid_argument);
}

TEST(Drift, HamiltonianOnSuccessfulFlow) {
    const auto inst = catalog::instantiate("case2.d");
    const auto tr = flow(inst.system, first_start(inst), 100.0, 1e-12, 1e-12);
    EXPECT_LE(drift(tr, MP::hamiltonian(inst.system), inst.system), 1e-8);
}

TEST(Drift, ReducedMomentumIsExactInvariant) {
    const auto inst = catalog::instantiate("case1.generic");
    const auto tr = flow(inst.system, first_start(inst), 100.0, 1e-12, 1e-12);
    EXPECT_LE(drift(tr, inst.integral("p3").poly, inst.system), 1e-10);
}

TEST(Drift, CoordinateGrowsOnFreeFlow) {
    const auto tr = flow(MagneticSystem{}, PhasePoint{{0, 0, 0}, {1, 0, 0}}, 100.0, 1e-12, 1e-12);
    EXPECT_GT(drift(tr, MP::coordinate(0), MagneticSystem{}), 10.0);
}

TEST(Rank, DuplicatedHamiltonian) {
    const auto inst = catalog::instantiate("case1.a");
    const MP H = MP::hamiltonian(inst.system);
    EXPECT_EQ(independence_rank({H, H}, inst.system, sample_points(inst.system, inst.sample_box, 20)), 1);
}

TEST(Rank, MinimalCaseTwoA) {
    const auto inst = catalog::instantiate("case2.a");
    EXPECT_EQ(independence_rank(inst.rank_set(), inst.system, sample_points(inst.system, inst.sample_box, 20)), 4);
}

TEST(Rank, MaximalLinearPotential) {
    const auto inst = catalog::instantiate("case1.d.max");
    EXPECT_EQ(inst.rank_set().size(), 6u);
    EXPECT_EQ(independence_rank(inst.rank_set(), inst.system, sample_points(inst.system, inst.sample_box, 20)), 5);
}

TEST(Rank, NeedsFivePoints) {
    const auto inst = catalog::instantiate("case1.a");
    EXPECT_THROW(independence_rank(inst.rank_set(), inst.system, sample_points(inst.system, inst.sample_box, 4)),
                 std::invalid_argument);
}

TEST(Recurrence, IsotropicCageClosesWithinOnePeriod) {
    const auto inst = catalog::instantiate("const.cagedosc", {{"ell", 1}, {"m", 1}, {"c", 0}});
    const PhasePoint pt0 = first_start(inst);
    const double period = std::stod(inst.meta("closure_period"));
    const auto rec = recurrence(dense_flow(inst.system, pt0, 1.25 * period), pt0, 1.0);
    EXPECT_LE(rec.min_distance, 1e-6);
    EXPECT_NEAR(rec.t_at_min, period, 1e-6 * period);
}

TEST(Recurrence, CommensurateCageCloses) {
    EXPECT_LE(caged_recurrence(1, 2, 1, 20).min_distance, 1e-5);
    EXPECT_LE(caged_recurrence(1, 1, 1, 20).min_distance, 1e-5);
}

TEST(Recurrence, IrrationalSurrogateStaysAway) {
    EXPECT_GT(caged_recurrence(1, 1.41421356, 1, 20).min_distance, 1e-2);
}

TEST(Recurrence, NeedsDenseOutput) {
    const auto tr = flow(MagneticSystem{}, PhasePoint{}, 2.0, 1e-10, 1e-10);
    EXPECT_THROW(recurrence(tr, PhasePoint{}, 1.0), std::invalid_argument);
}

TEST(DynamicsProperties, ConvergenceOrderAtLeastFive) {
    const double g = 2.0;
    const auto inst = catalog::instantiate("const.uniformB", {{"gamma", g}, {"v1", 0}, {"v4", 0}});
    const PhasePoint pt0{{0.3, 0.2, 0.1}, {0.7, 0.4, 0.5}};
    const double T = 20.0;
    const double c = pt0.p[2] / g;
    const double x1 = c + (pt0.x[0] - c) * std::cos(g * T) + pt0.p[0] / g * std::sin(g * T);
    const double p1 = -g * (pt0.x[0] - c) * std::sin(g * T) + pt0.p[0] * std::cos(g * T);
    auto run = [&](double tol) {
        FlowOptions o;
        o.t_end = T;
        o.rel_tol = o.abs_tol = tol;
        o.sample_times = {T};
        const auto tr = flow(inst.system, pt0, o);
        const auto& end = tr.points.back();
        return std::pair{std::hypot(end.x[0] - x1, end.p[0] - p1), double(tr.stats.rhs_evaluations)};
    };
    const auto [e1, n1] = run(1e-6);
    const auto [e2, n2] = run(1e-10);
    ASSERT_GT(e1, e2);
    EXPECT_GE(std::log(e1 / e2) / std::log(n2 / n1), 5.0);

    const auto h1 = flow(inst.system, pt0, T, 1e-7, 1e-7), h2 = flow(inst.system, pt0, T, 0.5e-7, 0.5e-7);
    const MP H = MP::hamiltonian(inst.system);
    EXPECT_LT(drift(h2, H, inst.system), drift(h1, H, inst.system));
}

TEST(DynamicsProperties, RankInvariantUnderRescalingAndMixing) {
    for (const char* id : {"case1.a", "case2.b", "case1.d.max", "const.uniformB"}) {
        const auto inst = catalog::instantiate(id);
        const auto pts = sample_points(inst.system, inst.sample_box, 20);
        auto set = inst.rank_set();
        const int base = independence_rank(set, inst.system, pts);
        set.back() = MP(Field(-7.5)) * set.back();
        EXPECT_EQ(independence_rank(set, inst.system, pts), base) << id;
        set[1] = set[1] + MP(Field(0.5)) * set[2];
        EXPECT_EQ(independence_rank(set, inst.system, pts), base) << id;
    }
}

TEST(DynamicsProperties, TimeReversalWithFlippedField) {
    // (x(t), p^A(t)) solves the A-system iff (x(-t), -p^A(-t)) solves the (-A)-system with the same W.
    for (const char* id : {"case1.a", "case2.a", "const.uniformB", "sec8.quadratic"}) {
        const auto inst = catalog::instantiate(id);
        const auto& sys = inst.system;
        GaugePotential flipped;
        for (int j = 0; j < 3; ++j) flipped.A[j] = -sys.gauge().A[j];
        const MagneticSystem back(flipped, sys.scalar_potential());
        const PhasePoint pt0 = first_start(inst);
        const double T = 20.0;
        const auto fw = flow(sys, pt0, T, 1e-12, 1e-12);
        const PhasePoint end = fw.points.back();
        const Vec3 q = covariant_momentum(end, sys);
        PhasePoint rev{end.x, {}};
        for (int j = 0; j < 3; ++j) rev.p[j] = -q[j] - flipped.A[j](end.x);
        const PhasePoint home = flow(back, rev, T, 1e-12, 1e-12).points.back();
        const Vec3 q0 = covariant_momentum(pt0, sys), qh = covariant_momentum(home, back);
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(home.x[j], pt0.x[j], 1e-7 * (1 + std::fabs(pt0.x[j]))) << id;
            EXPECT_NEAR(qh[j], -q0[j], 1e-7 * (1 + std::fabs(q0[j]))) << id;
        }
    }
}
