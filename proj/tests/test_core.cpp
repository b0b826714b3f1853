#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "magsep/catalog.hpp"
#include "magsep/core.hpp"
#include "magsep/sampling.hpp"

using namespace magsep;
using SF = ScalarFunction1D;

namespace {

PhasePoint at(Vec3 x, Vec3 p) { return {x, p}; }

// H = |p|^2/2 - gamma x1 p3 + gamma^2 x1^2/2 in the gauge A = (0, 0, -gamma x1).
MagneticSystem constant_field(double gamma) {
    GaugePotential g;
    g.A[2] = Field::monomial(-gamma, {1, 0, 0});
    return MagneticSystem(g, Field::monomial(gamma * gamma / 2.0, {2, 0, 0}));
}

Vec6 central_difference(const MagneticSystem& sys, const PhasePoint& pt) {
    Vec6 g{};
    const Vec6 v = pt.as_vector();
    for (int i = 0; i < 6; ++i) {
        const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::fabs(v[i]));
        Vec6 a = v, b = v;
        a[i] += h;
        b[i] -= h;
        g[i] = (hamiltonian(sys, PhasePoint::from_vector(a)) - hamiltonian(sys, PhasePoint::from_vector(b))) / (2 * h);
    }
    return g;
}

}  // namespace

TEST(ScalarFunction1D, DerivativesMatchClosedForms) {
    const SF f = SF::monomial(2.0, 1.5) * SF::exponential(1.0, 0.5);
    const double x = 0.7;
    const double e = std::exp(0.5 * x);
    EXPECT_NEAR(f(x), 2 * std::pow(x, 1.5) * e, 1e-15);
    EXPECT_NEAR(f.derivative()(x), 2 * (1.5 * std::sqrt(x) + 0.5 * std::pow(x, 1.5)) * e, 1e-14);

    const SF l = SF::log_abs(1.0, 2);
    EXPECT_NEAR(l(-2.0), std::pow(std::log(2.0), 2), 1e-15);
    EXPECT_NEAR(l.derivative()(-2.0), 2 * std::log(2.0) / -2.0, 1e-15);
    EXPECT_NEAR(l.derivative(2)(3.0), (2 - 2 * std::log(3.0)) / 9.0, 1e-15);

    const SF p = SF::monomial(1.0, 3);
    EXPECT_DOUBLE_EQ(p.derivative(3)(5.0), 6.0);
    EXPECT_TRUE(p.derivative(4).is_zero());
}

TEST(ScalarFunction1D, SingularAtomsDeclareOrigin) {
    EXPECT_TRUE(SF::monomial(1.0, -2).singular_at_zero());
    EXPECT_TRUE(SF::log_abs(1.0).singular_at_zero());
    EXPECT_FALSE(SF::monomial(1.0, 3).singular_at_zero());
    EXPECT_FALSE(SF::exponential(1.0, 2.0).singular_at_zero());
    EXPECT_TRUE(SF::monomial(1.0, 0.5).needs_positive());
    EXPECT_THROW(SF::monomial(1.0, -1)(0.0), DomainError);
}

TEST(CovariantMomentum, ZeroGauge) {
    const Vec3 q = covariant_momentum(at({0.3, 0.1, 2}, {1, 2, 3}), GaugePotential{});
    EXPECT_EQ(q, (Vec3{1, 2, 3}));
}

TEST(CovariantMomentum, CaseOneGauge) {
    const auto sys = MagneticSystem::case_one({SF::monomial(1, 1), SF::monomial(1, 1), SF(), SF()});
    EXPECT_EQ(covariant_momentum(at({1, 2, 0}, {0, 0, 1}), sys), (Vec3{0, 0, 2}));
}

TEST(CovariantMomentum, CaseTwoGauge) {
    const auto sys = MagneticSystem::case_two({SF::monomial(1, 1), SF::monomial(1, 2), SF()});
    EXPECT_EQ(covariant_momentum(at({2, 0, 0}, {1, 1, 1}), sys), (Vec3{1, 5, -1}));
}

TEST(CovariantMomentum, SingularPointNamesCoordinate) {
    const auto sys = MagneticSystem::case_one({SF(), SF::monomial(1, -1), SF(), SF()});
    try {
        covariant_momentum(at({0, 1, 0}, {0, 0, 0}), sys);
        FAIL() << "expected a domain error";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos) << e.what();
    }
}

TEST(Curl, ConstantField) {
    GaugePotential g;
    g.A[2] = Field::monomial(-2.0, {1, 0, 0});
    EXPECT_EQ(curl(g, {0.3, -1, 4}), (Vec3{0, 2, 0}));
}

TEST(Curl, ConstantPotential) {
    GaugePotential g{{Field(1.0), Field(-2.0), Field(3.0)}};
    EXPECT_EQ(curl(g, {1, 2, 3}), (Vec3{0, 0, 0}));
}

TEST(Curl, CaseOne) {
    const auto sys = MagneticSystem::case_one({SF::monomial(1, 2), SF::monomial(1, 3), SF(), SF()});
    EXPECT_EQ(curl(sys.gauge(), {1, 2, 0.5}), (Vec3{4, 3, 0}));
    EXPECT_EQ(sys.B({1, 2, 0.5}), (Vec3{4, 3, 0}));
}

TEST(Hamiltonian, FreeSystem) { EXPECT_DOUBLE_EQ(hamiltonian(MagneticSystem{}, at({1, 1, 1}, {1, 2, 2})), 4.5); }

TEST(Hamiltonian, ConstantFieldHandValue) {
    const auto sys = constant_field(2.0);
    EXPECT_DOUBLE_EQ(hamiltonian(sys, at({2, 1, 1}, {2, 0, 4})), 2.0);
    EXPECT_DOUBLE_EQ(hamiltonian_gauge_form(sys, at({2, 1, 1}, {2, 0, 4})), 2.0);
}

TEST(Hamiltonian, RoutesAgreeWithinEightUlpOnCaseOneA) {
    const auto inst = catalog::instantiate("case1.a");
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 100)) {
        const double a = hamiltonian(inst.system, pt);
        const double b = hamiltonian_gauge_form(inst.system, pt);
        const Vec3 q = covariant_momentum(pt, inst.system);
        const double scale = 0.5 * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) + std::fabs(inst.system.W(pt.x));
        EXPECT_LE(std::fabs(a - b), 8 * std::numeric_limits<double>::epsilon() * scale);
    }
}

TEST(Hamiltonian, SingularPointThrows) {
    const auto inst = catalog::instantiate("case2.b");
    EXPECT_THROW(hamiltonian(inst.system, at({0, 1, 1}, {0, 0, 0})), DomainError);
}

TEST(HamiltonianGradient, FreeSystem) {
    EXPECT_EQ(hamiltonian_gradient(MagneticSystem{}, at({0.2, 3, 1}, {1, 0, 0})), (Vec6{0, 0, 0, 1, 0, 0}));
}

TEST(HamiltonianGradient, ConstantFieldHandValue) {
    const Vec6 g = hamiltonian_gradient(constant_field(1.0), at({1, 0, 0}, {0, 0, 0}));
    EXPECT_DOUBLE_EQ(g[0], 1.0);
}

TEST(HamiltonianGradient, MatchesFiniteDifferencesOnCatalog) {
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        for (const auto& pt : sample_points(inst.system, inst.sample_box, 20)) {
            const Vec6 exact = hamiltonian_gradient(inst.system, pt);
            const Vec6 fd = central_difference(inst.system, pt);
            for (int i = 0; i < 6; ++i) EXPECT_NEAR(fd[i], exact[i], 1e-6 * (1 + std::fabs(exact[i]))) << e.id;
        }
    }
}

TEST(GaugeTransform, LinearShiftOnConstantField) {
    const auto sys = constant_field(2.0);
    const auto moved = gauge_transform(sys, Field::monomial(5.0, {1, 0, 0}));
    const Vec3 x{0.7, -0.2, 1.3};
    EXPECT_EQ(moved.gauge()(x), (Vec3{5, 0, -2 * 0.7}));
    EXPECT_EQ(moved.B(x), sys.B(x));
}

TEST(GaugeTransform, EffectivePotentialUnchanged) {
    const auto inst = catalog::instantiate("case1.a");
    const auto moved = gauge_transform(inst.system, Field::monomial(1.0, {0, 2, 0}) + Field::monomial(-3.0, {1, 1, 1}));
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 100)) {
        const double w = inst.system.W(pt.x);
        EXPECT_NEAR(moved.W(pt.x), w, 1e-13 * (1 + std::fabs(w)));
    }
}

TEST(GaugeTransform, CaseOneAIntegralUnchanged) {
    const auto inst = catalog::instantiate("case1.a");
    const Field chi = Field::monomial(1.0, {0, 2, 0});
    const auto moved = gauge_transform(inst.system, chi);
    const auto& X3 = inst.integral("X3").poly;
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 50)) {
        const double before = X3.evaluate(inst.system, pt);
        const double after = X3.evaluate(moved, shift_momenta(pt, chi));
        EXPECT_NEAR(after, before, 1e-12 * (1 + std::fabs(before)));
    }
}

TEST(CoreProperties, HamiltonianRoutesAgreeOnEveryEntry) {
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        for (const auto& pt : sample_points(inst.system, inst.sample_box, 100)) {
            const double h = hamiltonian(inst.system, pt);
            EXPECT_LE(std::fabs(h - hamiltonian_gauge_form(inst.system, pt)), 1e-12 * (1 + std::fabs(h))) << e.id;
        }
    }
}

TEST(CoreProperties, CurlInvariantUnderPolynomialGauge) {
    const Field chi = Field::monomial(2.0, {2, 1, 0}) + Field::monomial(-1.0, {0, 1, 3}) + Field::monomial(0.5, {1, 1, 1});
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        const auto moved = gauge_transform(inst.system, chi);
        for (const auto& pt : sample_points(inst.system, inst.sample_box, 20)) {
            const Vec3 a = curl(inst.system.gauge(), pt.x);
            const Vec3 b = curl(moved.gauge(), pt.x);
            EXPECT_EQ(a, b) << e.id;
        }
    }
}

TEST(CoreProperties, EffectivePotentialIdentity) {
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        for (const auto& pt : sample_points(inst.system, inst.sample_box, 1000)) {
            const Vec3 a = inst.system.gauge()(pt.x);
            const double w = inst.system.V(pt.x) - 0.5 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
            EXPECT_NEAR(inst.system.W(pt.x), w, 1e-12 * (1 + std::fabs(w))) << e.id;
        }
    }
}

TEST(CoreProperties, CaseFormsOfEffectivePotential) {
    const SF u1 = SF::monomial(1, 2), u2 = SF::exponential(2, 0.5), V1 = SF::monomial(3, 1), V2 = SF::log_abs(1);
    const auto one = MagneticSystem::case_one({u1, u2, V1, V2});
    const auto two = MagneticSystem::case_two({u2, u1, V1});
    for (const Vec3& x : {Vec3{0.4, -0.9, 2}, Vec3{-1.2, 0.3, -0.5}}) {
        const double a3 = u1(x[1]) - u2(x[0]);
        EXPECT_NEAR(one.W(x), V1(x[0]) + V2(x[1]) - 0.5 * a3 * a3, 1e-14);
        EXPECT_NEAR(two.W(x), V1(x[0]) - 0.5 * (u1(x[0]) * u1(x[0]) + u2(x[0]) * u2(x[0])), 1e-14);
    }
}
