#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "magsep/catalog.hpp"
#include "magsep/dynamics.hpp"
#include "magsep/sampling.hpp"

using namespace magsep;
using catalog::Classification;

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

int rank_for(Classification c) {
    switch (c) {
        case Classification::integrable: return 3;
        case Classification::minimal: return 4;
        case Classification::maximal: return 5;
    }
    return 0;
}

template <class F>
void expect_validation_error(F&& f, const std::string& fragment) {
    try {
        f();
        FAIL() << "expected a validation error mentioning " << fragment;
    } catch (const catalog::ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(CatalogList, ContainsEveryFamily) {
    std::set<std::string> ids;
    for (const auto& e : catalog::list()) ids.insert(e.id);
    const std::set<std::string> expected{"case1.generic", "case2.generic", "case1.a", "case1.b", "case1.c", "case1.d",
                                         "case1.d.max", "case2.a", "case2.b", "case2.c", "case2.d", "const.uniformB",
                                         "const.cagedosc", "const.cagedosc.x5", "extcage", "sec8.quadratic"};
    EXPECT_GE(catalog::list().size(), 15u);
    for (const auto& id : expected) EXPECT_TRUE(ids.count(id)) << id;
}

TEST(CatalogList, MaximalLinearPotentialEntry) {
    EXPECT_EQ(catalog::find("case1.d.max").classification, Classification::maximal);
}

TEST(CatalogList, GenericCaseTwoIsIntegrableWithLinearIntegrals) {
    EXPECT_EQ(catalog::find("case2.generic").classification, Classification::integrable);
    const auto inst = catalog::instantiate("case2.generic");
    ASSERT_EQ(inst.integrals.size(), 2u);
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 10)) {
        EXPECT_DOUBLE_EQ(inst.integral("X1").poly.evaluate(inst.system, pt), pt.p[1]);
        EXPECT_DOUBLE_EQ(inst.integral("X2").poly.evaluate(inst.system, pt), pt.p[2]);
    }
    for (const auto& I : inst.integrals) EXPECT_EQ(I.role, catalog::Role::cartesian);
}

TEST(CatalogInstantiate, CaseOneAField) {
    const auto inst = catalog::instantiate("case1.a", {{"a", 1}, {"b", 1}, {"c", 2}, {"w", 0}});
    const Vec3 B = inst.system.B({0, 0, 0});
    EXPECT_NEAR(B[0], 1.0, 1e-15);
    EXPECT_NEAR(B[1], 2.0, 1e-15);
    EXPECT_EQ(B[2], 0.0);
}

TEST(CatalogInstantiate, CaseOneARejectsZeroB) {
    expect_validation_error([] { catalog::instantiate("case1.a", {{"a", 1}, {"b", 0}, {"c", 1}}); }, "b != 0");
}

TEST(CatalogInstantiate, PredicatesNameTheViolation) {
    expect_validation_error([] { catalog::instantiate("case2.b", {{"b", 2}}); }, "b != 2");
    expect_validation_error([] { catalog::instantiate("const.uniformB", {{"gamma", 0}}); }, "gamma != 0");
    expect_validation_error([] { catalog::instantiate("case1.a", {{"q", 1}}); }, "q");
    expect_validation_error([] { catalog::instantiate("case9.z"); }, "case9.z");
}

TEST(CatalogInstantiate, CaseTwoDField) {
    const auto inst = catalog::instantiate("case2.d", {{"a", 2}, {"b", 0}, {"w", 1}});
    const Vec3 B = inst.system.B({1, 0.3, -0.6});
    EXPECT_EQ(B[0], 0.0);
    EXPECT_EQ(B[1], 0.0);
    EXPECT_NEAR(B[2], 2.0, 1e-15);
}

TEST(CatalogInstantiate, CaseTwoDAtZeroBIsPermutedCaseTwoB) {
    const double a = 2.0, w = 1.0;
    const auto d = catalog::instantiate("case2.d", {{"a", a}, {"b", 0}, {"w", w}});
    const auto b = catalog::instantiate("case2.b", {{"a", -a / 2}, {"b", 0}, {"c", 0}, {"w", w}});
    for (const auto& pt : sample_points(d.system, d.sample_box, 50)) {
        const Vec3 swapped{pt.x[0], pt.x[2], pt.x[1]};
        EXPECT_NEAR(b.system.W(swapped), d.system.W(pt.x), 1e-12 * (1 + std::fabs(d.system.W(pt.x))));
        const Vec3 Bd = d.system.B(pt.x), Bb = b.system.B(swapped);
        EXPECT_NEAR(std::fabs(Bb[1]), std::fabs(Bd[2]), 1e-12 * std::fabs(Bd[2]));
        EXPECT_EQ(Bb[2], Bd[1]);
    }
}

TEST(CatalogInstantiate, CaseTwoBLimitAtZero) {
    // B = (0, A x1^-3, 0), W = -A^2/(8 x1^4) + w'/x1^2 with A = -2a, w' = w - 2ac.
    const double a = 1.3, c = 0.7, w = -0.4;
    const auto inst = catalog::instantiate("case2.b", {{"a", a}, {"b", 0}, {"c", c}, {"w", w}});
    const double A = -2 * a, wp = w - 2 * a * c;
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 50)) {
        const double x = pt.x[0];
        const double W = -A * A / (8 * std::pow(x, 4)) + wp / (x * x);
        EXPECT_NEAR(inst.system.W(pt.x), W, 1e-12 * std::fabs(W));
        EXPECT_NEAR(inst.system.B(pt.x)[1], A / (x * x * x), 1e-12 * std::fabs(A / (x * x * x)));
    }
    const auto near = catalog::instantiate("case2.b", {{"a", a}, {"b", 1e-7}, {"c", c}, {"w", w}});
    const Vec3 x{0.8, 0.1, 0.2};
    EXPECT_NEAR(near.system.W(x), inst.system.W(x), 1e-5);
}

TEST(CatalogInstantiate, CaseTwoBLimitAtOne) {
    // B = (0, A x1^-2, 0), W = C/x1 + w'/x1^2 with A = -a, C = -ac, w' = w - a^2/2.
    const double a = 1.3, c = 0.7, w = -0.4;
    const auto inst = catalog::instantiate("case2.b", {{"a", a}, {"b", 1}, {"c", c}, {"w", w}});
    const double A = -a, C = -a * c, wp = w - a * a / 2;
    for (const auto& pt : sample_points(inst.system, inst.sample_box, 50)) {
        const double x = pt.x[0];
        const double W = C / x + wp / (x * x);
        EXPECT_NEAR(inst.system.W(pt.x), W, 1e-12 * (1 + std::fabs(W)));
        EXPECT_NEAR(inst.system.B(pt.x)[1], A / (x * x), 1e-12 * std::fabs(A / (x * x)));
    }
}

TEST(CatalogInstantiate, CagedOscillatorClassificationFollowsRatio) {
    EXPECT_EQ(catalog::instantiate("const.cagedosc", {{"ell", 1}, {"m", 2}}).classification, Classification::maximal);
    EXPECT_EQ(catalog::instantiate("const.cagedosc", {{"ell", 3}, {"m", 2}}).classification, Classification::maximal);
    EXPECT_EQ(catalog::instantiate("const.cagedosc", {{"ell", 1}, {"m", 1.41421356}}).classification,
              Classification::minimal);
}

TEST(CatalogInstantiate, ExtendedCageRatioCondition) {
    const auto ok = catalog::instantiate("extcage");
    EXPECT_EQ(ok.classification, Classification::minimal);
    EXPECT_EQ(ok.expected_rank, 4);
    const auto broken = catalog::instantiate("extcage", {{"l2", 2}});
    EXPECT_EQ(broken.classification, Classification::integrable);
    EXPECT_EQ(broken.expected_rank, 3);
    EXPECT_FALSE(ok.meta("classification_note").empty());
    EXPECT_TRUE(broken.meta("classification_note").empty());
}

TEST(CatalogInstantiate, QuadraticPotentialSubcases) {
    const auto deg = catalog::instantiate("sec8.quadratic");
    EXPECT_EQ(deg.meta("degenerate"), "true");
    EXPECT_EQ(deg.classification, Classification::maximal);
    EXPECT_NO_THROW(deg.integral("Z"));
    const auto gen = catalog::instantiate("sec8.quadratic", {{"a1", 0.5}});
    EXPECT_EQ(gen.meta("degenerate"), "false");
    EXPECT_EQ(gen.classification, Classification::minimal);
    const auto inv = catalog::instantiate("sec8.quadratic", {{"a1", 2}});
    EXPECT_EQ(inv.meta("inverted"), "true");
    const auto split = catalog::instantiate("sec8.quadratic", {{"v22", 2}});
    EXPECT_EQ(split.classification, Classification::integrable);
}

TEST(CatalogInstantiate, PerturbationOnlyTouchesSystem) {
    const auto p = catalog::parse_perturbation("case1.a", "W:+0.1");
    EXPECT_EQ(p.param, "w");
    EXPECT_DOUBLE_EQ(p.delta, 0.1);
    const auto base = catalog::instantiate("case1.a");
    const auto pert = catalog::instantiate("case1.a", {}, p);
    const PhasePoint pt{{0.3, -0.4, 0.5}, {0.1, 0.2, 0.3}};
    EXPECT_EQ(pert.integral("X3").poly.evaluate(pert.system, pt) - base.integral("X3").poly.evaluate(base.system, pt), 0.0);
    EXPECT_NE(pert.system.W(pt.x), base.system.W(pt.x));
    EXPECT_FALSE(pert.meta("perturbation").empty());
    EXPECT_THROW(catalog::parse_perturbation("case1.a", "zz:+1"), catalog::ValidationError);
}

TEST(CatalogProperties, EveryEntryIsConsistent) {
    for (const auto& e : catalog::list()) {
        SCOPED_TRACE(e.id);
        const auto inst = catalog::instantiate(e.id);
        EXPECT_EQ(inst.expected_rank, rank_for(inst.classification));
        EXPECT_FALSE(e.anchor.empty());
        const auto pts = sample_points(inst.system, inst.sample_box, 100);
        double bmax = 0.0;
        for (const auto& pt : pts) bmax = std::max(bmax, norm(inst.system.B(pt.x)));
        EXPECT_GT(bmax, 1e-6);
        for (const auto& I : inst.integrals) {
            EXPECT_FALSE(I.reference.empty()) << I.name;
            EXPECT_LE(bracket_residual(inst.system, I.poly, pts), 1e-10) << I.name;
            if (I.poly.degree() <= 2) { EXPECT_TRUE(I.spec.has_value()) << I.name; }
        }
        const std::vector<PhasePoint> few(pts.begin(), pts.begin() + 20);
        EXPECT_EQ(independence_rank(inst.rank_set(), inst.system, few), inst.explicit_rank);
    }
}

TEST(CatalogProperties, DefaultsAreReproducible) {
    for (const auto& e : catalog::list()) {
        const auto a = catalog::instantiate(e.id);
        const auto b = catalog::instantiate(e.id);
        const PhasePoint pt = sample_points(a.system, a.sample_box, 1).front();
        EXPECT_EQ(hamiltonian(a.system, pt), hamiltonian(b.system, pt)) << e.id;
        for (const auto& spec : e.params) EXPECT_TRUE(a.params.count(spec.name)) << e.id << " " << spec.name;
    }
}
