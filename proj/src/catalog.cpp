#include "magsep/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

namespace magsep::catalog {

namespace {

using SF = ScalarFunction1D;
using MP = MomentumPolynomial;
using KP = KappaPolynomial;

Field on(int axis, const SF& f) { return Field::on_axis(f, axis); }
SF mono(double c, double k) { return SF::monomial(c, k); }
Field x(int i) { return Field::coordinate(i); }
MP P(int j) { return MP::momentum(j); }
MP L(int j) { return MP::angular(j); }
MP F(const Field& f) { return MP(f); }

MP canon(const GaugePotential& g, const std::vector<std::pair<MultiIndex, Field>>& terms) {
    return MP::from_canonical(terms, g);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Predicate {
    std::string text;
    std::function<bool(const ParamMap&)> holds;
};

struct Registered {
    CatalogEntry entry;
    std::vector<Predicate> predicates;
    std::function<void(const ParamMap&, Instance&)> build;
};

Predicate nonzero(const std::string& name) {
    return {name + " != 0", [name](const ParamMap& p) { return p.at(name) != 0.0; }};
}

SampleBox box_for(const MagneticSystem& sys, double hx, double hp, double guard) {
    SampleBox b;
    for (int i = 0; i < 3; ++i) {
        b.lo[i] = -hx;
        b.hi[i] = hx;
        b.lo[i + 3] = -hp;
        b.hi[i + 3] = hp;
        if (sys.positive_axes()[i]) {
            b.lo[i] = guard;
        } else if (sys.singular_axes()[i]) {
            b.min_abs[i] = guard;
        }
    }
    return b;
}

void default_boxes(Instance& inst) {
    inst.sample_box = box_for(inst.system, 1.5, 1.5, 0.2);
    inst.start_box = box_for(inst.system, 1.0, 0.5, 0.3);
}

ShippedIntegral shipped(std::string name, Role role, std::string ref, MP poly) {
    ShippedIntegral s;
    s.name = std::move(name);
    s.role = role;
    s.reference = std::move(ref);
    s.poly = std::move(poly);
    return s;
}

ShippedIntegral from_spec(std::string name, Role role, std::string ref, const QuadraticIntegralSpec& spec) {
    ShippedIntegral s = shipped(std::move(name), role, std::move(ref), to_polynomial(spec));
    s.spec = spec;
    return s;
}

// X1 = p1^2 - 2 u2 p3 + 2 V1, X2 = p2^2 + 2 u1 p3 + 2 V2 and p3, in canonical momenta.
void add_case_one_cartesian(Instance& inst, const CaseOneData& d) {
    const auto& g = inst.system.gauge();
    const std::string ref = "Case I Cartesian integrals";
    inst.integrals.push_back(shipped(
        "X1", Role::cartesian, ref,
        canon(g, {{{2, 0, 0}, Field(1.0)}, {{0, 0, 1}, on(0, -(d.u2 * SF(2.0)))}, {{0, 0, 0}, on(0, d.V1 * SF(2.0))}})));
    inst.integrals.push_back(shipped(
        "X2", Role::cartesian, ref,
        canon(g, {{{0, 2, 0}, Field(1.0)}, {{0, 0, 1}, on(1, d.u1 * SF(2.0))}, {{0, 0, 0}, on(1, d.V2 * SF(2.0))}})));
    inst.integrals.push_back(shipped("p3", Role::cartesian, "Case I cyclic momentum", canon(g, {{{0, 0, 1}, Field(1.0)}})));
}

void add_case_two_cartesian(Instance& inst) {
    const auto& g = inst.system.gauge();
    const std::string ref = "Case II Cartesian integrals";
    inst.integrals.push_back(shipped("X1", Role::cartesian, ref, canon(g, {{{0, 1, 0}, Field(1.0)}})));
    inst.integrals.push_back(shipped("X2", Role::cartesian, ref, canon(g, {{{0, 0, 1}, Field(1.0)}})));
}

// Best rational approximation with bounded denominator; nullopt when none is within tolerance.
std::optional<std::pair<long, long>> as_rational(double v, long max_den = 1000, double tol = 1e-9) {
    if (!std::isfinite(v) || v <= 0.0) return std::nullopt;
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = v;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(r);
        const long a = long(fl);
        const long h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::fabs(double(h1) / double(k1) - v) <= tol * v) return std::pair{h1, k1};
        if (r - fl < 1e-15) break;
        r = 1.0 / (r - fl);
    }
    return std::nullopt;
}

bool perfect_square(long n) {
    const long r = std::lround(std::sqrt(double(n)));
    return r * r == n;
}

// ---------------------------------------------------------------- Case I

Registered case1_generic() {
    Registered r;
    r.entry = {"case1.generic", "Case I", "u1 = k1 x2^3, u2 = k2 x1^3, V1 = v1 x1^4, V2 = v2 x2^4",
               {{"k1", 1.0, false}, {"k2", 1.0, false}, {"v1", 1.0, true}, {"v2", 1.0, true}},
               {}, Classification::integrable, 3};
    r.predicates = {{"k1 != 0 or k2 != 0", [](const ParamMap& p) { return p.at("k1") != 0.0 || p.at("k2") != 0.0; }}};
    r.build = [](const ParamMap& p, Instance& inst) {
        const CaseOneData d{mono(p.at("k1"), 3), mono(p.at("k2"), 3), mono(p.at("v1"), 4), mono(p.at("v2"), 4)};
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);
        inst.explicit_rank = 3;
        default_boxes(inst);
    };
    return r;
}

Registered case1_a() {
    Registered r;
    r.entry = {"case1.a", "Case I.a", "B = (a e^{b x2}, c, 0)",
               {{"a", 1.0, false}, {"b", 1.0, false}, {"c", 1.0, false}, {"w", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("a"), nonzero("b"), nonzero("c")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a = p.at("a"), b = p.at("b"), c = p.at("c"), w = p.at("w");
        const CaseOneData d{SF::exponential(a / b, b), mono(c, 1), mono(c * c / 2.0, 2), SF::exponential(a * w, b)};
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);
        QuadraticIntegralSpec s;
        s.gamma[0][2] = 1.0;
        s.s[0] = Field(w * b) - on(1, SF::exponential(a / b, b)) + on(0, mono(c, 1));
        s.s[1] = Field(-c / b);
        s.s[2] = on(2, mono(-c, 1));
        s.m = x(2) * (on(1, SF::exponential(c * a / b, b)) - on(0, mono(c * c, 1)) - Field(c * w * b));
        inst.integrals.push_back(from_spec("X3", Role::additional, "Case I.a", s));
        inst.explicit_rank = 4;
        default_boxes(inst);
        inst.start_box.lo[5] = 0.0;
        inst.start_box.hi[5] = 0.5;
    };
    return r;
}

// Rows E1-E3: planar system with c_j = a_j kappa + b_j lifted through kappa -> p3.
Registered table_row(int row) {
    static const char* ids[] = {"case1.b", "case1.c", "case1.d"};
    static const char* anchors[] = {"Case I.b (E1)", "Case I.c (E2)", "Case I.d (E3)"};
    static const char* desc[] = {"c1 (x1^2 + x2^2) + c2 / x1^2 + c3 / x2^2", "c1 (4 x1^2 + x2^2) + c2 x1 + c3 / x2^2",
                                 "c1 (x1^2 + x2^2) + c2 x1 + c3 x2"};
    Registered r;
    r.entry = {ids[row], anchors[row], std::string("planar potential ") + desc[row] + ", c_j = a_j p3 + b_j",
               {{"a1", 1.0, false}, {"a2", 1.0, false}, {"a3", 1.0, false},
                {"b1", 1.0, true}, {"b2", 1.0, true}, {"b3", 1.0, true}},
               {}, Classification::minimal, 4};
    r.build = [row](const ParamMap& p, Instance& inst) {
        const double a1 = p.at("a1"), a2 = p.at("a2"), a3 = p.at("a3");
        const double b1 = p.at("b1"), b2 = p.at("b2"), b3 = p.at("b3");
        CaseOneData d;
        if (row == 0) {
            d = {mono(a1, 2) + mono(a3, -2), mono(-a1, 2) + mono(-a2, -2), mono(b1, 2) + mono(b2, -2),
                 mono(b1, 2) + mono(b3, -2)};
        } else if (row == 1) {
            d = {mono(a1, 2) + mono(a3, -2), mono(-4.0 * a1, 2) + mono(-a2, 1), mono(4.0 * b1, 2) + mono(b2, 1),
                 mono(b1, 2) + mono(b3, -2)};
        } else {
            d = {mono(a1, 2) + mono(a3, 1), mono(-a1, 2) + mono(-a2, 1), mono(b1, 2) + mono(b2, 1),
                 mono(b1, 2) + mono(b3, 1)};
        }
        auto cj = [](double a, double b) { return KP(Field(a)) * KP::kappa() + KP(Field(b)); };
        const KP c1 = cj(a1, b1), c2 = cj(a2, b2), c3 = cj(a3, b3);
        const KP x1 = KP::coordinate(0), x2 = KP::coordinate(1), p1 = KP::momentum(0), p2 = KP::momentum(1);
        const KP two(Field(2.0));
        const KP L3 = x1 * p2 - x2 * p1;
        KP I;
        if (row == 0) {
            I = L3 * L3 + two * (c2 * KP(Field::monomial(1.0, {-2, 2, 0})) + c3 * KP(Field::monomial(1.0, {2, -2, 0})));
        } else if (row == 1) {
            I = p2 * L3 - KP(Field::monomial(1.0, {0, 2, 0})) * (two * c1 * x1 + c2 * KP(Field(0.5))) +
                two * c3 * KP(Field::monomial(1.0, {1, -2, 0}));
        } else {
            I = p1 * p2 + two * c1 * x1 * x2 + c2 * x2 + c3 * x1;
        }
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);
        ShippedIntegral X3 = shipped("X3", Role::additional, anchors[row], lift_integral(I, inst.system.gauge()));
        X3.planar = I;
        inst.integrals.push_back(std::move(X3));
        inst.explicit_rank = 4;
        default_boxes(inst);
        inst.start_box.lo[5] = 0.0;
        inst.start_box.hi[5] = 0.5;
    };
    return r;
}

Registered case1_d_max() {
    Registered r;
    r.entry = {"case1.d.max", "linear potential, maximal", "u2 = a2 x1, V2 = v21 x2; B = (0, a2, 0)",
               {{"a2", 1.0, false}, {"v21", 1.0, true}},
               {}, Classification::maximal, 5};
    r.predicates = {nonzero("a2")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a2 = p.at("a2"), v21 = p.at("v21");
        const CaseOneData d{SF(), mono(a2, 1), SF(), mono(v21, 1)};
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);
        const auto& g = inst.system.gauge();
        inst.integrals.push_back(shipped(
            "X3", Role::additional, "linear potential X3",
            canon(g, {{{1, 1, 0}, Field(1.0)}, {{0, 0, 1}, Field::monomial(-a2, {0, 1, 0})},
                      {{0, 0, 0}, Field::monomial(v21, {1, 0, 0})}})));
        const MP X4 = MP(3.0) * P(2) * L(0) - P(0) * L(2) - MP(3.0 * v21 / a2) * L(1) +
                      F(Field::monomial(a2, {1, 1, 0})) * P(2) + F(Field::monomial(3.0 * a2, {1, 0, 0})) * L(0) +
                      F(Field::monomial(v21, {2, 0, 0}) + Field::monomial(a2 * a2, {2, 1, 0}));
        inst.integrals.push_back(shipped("X4", Role::additional, "linear potential X4", X4));
        inst.explicit_rank = 5;
        default_boxes(inst);
        // Motion is polynomial in t; small momenta keep X4 well conditioned along the flow.
        for (int j = 3; j < 6; ++j) {
            inst.start_box.lo[j] = -0.01;
            inst.start_box.hi[j] = 0.01;
        }
    };
    return r;
}

// ---------------------------------------------------------------- Case II

Registered case2_generic() {
    Registered r;
    r.entry = {"case2.generic", "Case II", "u2 = k2 x1^3, u3 = k3 x1^2, V1 = v1 x1^4",
               {{"k2", 1.0, false}, {"k3", 1.0, false}, {"v1", 1.0, false}},
               {}, Classification::integrable, 3};
    r.predicates = {{"k2 != 0 or k3 != 0", [](const ParamMap& p) { return p.at("k2") != 0.0 || p.at("k3") != 0.0; }}};
    r.build = [](const ParamMap& p, Instance& inst) {
        inst.system = MagneticSystem::case_two({mono(p.at("k2"), 3), mono(p.at("k3"), 2), mono(p.at("v1"), 4)});
        add_case_two_cartesian(inst);
        inst.explicit_rank = 3;
        default_boxes(inst);
    };
    return r;
}

Registered case2_a() {
    Registered r;
    r.entry = {"case2.a", "Case II.a", "u2 = (a/b) e^{b x1}, V1 = w x1 + c e^{b x1}",
               {{"a", 1.0, false}, {"b", 1.0, false}, {"c", 1.0, true}, {"w", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("a"), nonzero("b")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a = p.at("a"), b = p.at("b"), c = p.at("c"), w = p.at("w");
        inst.system = MagneticSystem::case_two({SF::exponential(a / b, b), SF(), mono(w, 1) + SF::exponential(c, b)});
        add_case_two_cartesian(inst);
        QuadraticIntegralSpec s;
        s.gamma[0][1] = 1.0;
        s.beta[2][0] = -b;
        const double k = b * b * c / a;
        s.s[1] = x(2) * (on(0, SF::exponential(a, b)) - Field(k));
        s.s[2] = x(1) * (on(0, SF::exponential(-2.0 * a, b)) + Field(k));
        s.m = x(1) * (on(0, SF::exponential(-a * a / b, 2.0 * b)) + on(0, SF::exponential(b * c, b)) + Field(w));
        inst.integrals.push_back(from_spec("X3", Role::additional, "Case II.a", s));
        inst.explicit_rank = 4;
        default_boxes(inst);
    };
    return r;
}

Registered case2_b() {
    Registered r;
    r.entry = {"case2.b", "Case II.b", "u2 = a x1^{b-2}, V1 = a (b-2) c x1^{b-2} + w / x1^2",
               {{"a", 1.0, false}, {"b", 1.0, false}, {"c", 1.0, true}, {"w", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("a"), {"b != 2", [](const ParamMap& p) { return p.at("b") != 2.0; }}};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a = p.at("a"), b = p.at("b"), c = p.at("c"), w = p.at("w");
        inst.system = MagneticSystem::case_two({mono(a, b - 2.0), SF(), mono(a * (b - 2.0) * c, b - 2.0) + mono(w, -2)});
        add_case_two_cartesian(inst);
        QuadraticIntegralSpec s;
        s.beta[0][2] = 1.0;
        s.beta[2][0] = -b;
        s.s[1] = x(2) * (on(0, mono(b * a, b - 2.0)) - Field(b * c * (b - 2.0)));
        s.s[2] = x(1) * (on(0, mono(-2.0 * a * (b - 1.0), b - 2.0)) + Field(b * c * (b - 2.0)));
        s.m = x(1) * (on(0, mono(-a * a * (b - 2.0), 2.0 * b - 4.0)) +
                      on(0, mono(a * c * (b - 2.0) * (b - 2.0), b - 2.0)) + on(0, mono(-2.0 * w, -2)));
        inst.integrals.push_back(from_spec("X3", Role::additional, "Case II.b", s));
        inst.explicit_rank = 4;
        default_boxes(inst);
    };
    return r;
}

Registered case2_c() {
    Registered r;
    r.entry = {"case2.c", "Case II.c", "u2 = a ln|x1|, V1 = b ln|x1| + w / x1^2",
               {{"a", 1.0, false}, {"b", 1.0, true}, {"w", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("a")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a = p.at("a"), b = p.at("b"), w = p.at("w");
        inst.system = MagneticSystem::case_two({SF::log_abs(a), SF(), SF::log_abs(b) + mono(w, -2)});
        add_case_two_cartesian(inst);
        QuadraticIntegralSpec s;
        s.beta[0][2] = 1.0;
        s.beta[2][0] = -2.0;
        s.s[1] = x(2) * (on(0, SF::log_abs(2.0 * a)) - Field(2.0 * b / a));
        s.s[2] = x(1) * (on(0, SF::log_abs(-2.0 * a)) + Field((2.0 * b - a * a) / a));
        s.m = x(1) * (on(0, mono(-2.0 * w, -2)) + on(0, SF::log_abs(-a * a)) + Field(b));
        inst.integrals.push_back(from_spec("X3", Role::additional, "Case II.c", s));
        inst.explicit_rank = 4;
        default_boxes(inst);
    };
    return r;
}

Registered case2_d() {
    Registered r;
    r.entry = {"case2.d", "Case II.d", "u3 = -a / (2 x1^2), V1 = -a b ln|x1| / x1^2 + w / x1^2; B = (0, 0, a / x1^3)",
               {{"a", 1.0, false}, {"b", 1.0, true}, {"w", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("a")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a = p.at("a"), b = p.at("b"), w = p.at("w");
        const Atom log_over_sq{-2.0, 0.0, 1};
        inst.system =
            MagneticSystem::case_two({SF(), mono(-a / 2.0, -2), SF::from_atom(-a * b, log_over_sq) + mono(w, -2)});
        add_case_two_cartesian(inst);
        QuadraticIntegralSpec s;
        s.beta[0][1] = 1.0;
        s.s[1] = x(2) * (Field(2.0 * b) - on(0, mono(a, -2)));
        s.s[2] = Field::monomial(-2.0 * b, {0, 1, 0});
        s.m = x(2) * (on(0, mono(-a * a / 2.0, -4)) + on(0, SF::from_atom(-2.0 * a * b, log_over_sq)) +
                      on(0, mono(a * b + 2.0 * w, -2)));
        inst.integrals.push_back(from_spec("X3", Role::additional, "Case II.d", s));
        inst.explicit_rank = 4;
        default_boxes(inst);
    };
    return r;
}

// ---------------------------------------------------------------- constant field B = (0, gamma, 0)

// A = (0, 0, -gamma x1), W = V(x2); the Case I form with u2 = gamma x1.
MagneticSystem constant_field_system(double gamma, const SF& Vy) {
    return MagneticSystem::case_one({SF(), mono(gamma, 1), mono(gamma * gamma / 2.0, 2), Vy});
}

void add_constant_field_integrals(Instance& inst, double gamma) {
    const auto& g = inst.system.gauge();
    const std::string ref = "constant field first-order integrals";
    const MP I1 = canon(g, {{{1, 0, 0}, Field(1.0)}, {{0, 0, 0}, Field::monomial(-gamma, {0, 0, 1})}});
    const MP I2 = canon(g, {{{0, 0, 1}, Field(1.0)}});
    const MP I3 = canon(g, {{{1, 0, 0}, Field::monomial(2.0, {0, 0, 1})},
                            {{0, 0, 1}, Field::monomial(-2.0, {1, 0, 0})},
                            {{0, 0, 0}, Field::monomial(gamma, {2, 0, 0}) + Field::monomial(-gamma, {0, 0, 2})}});
    const MP H = MP::hamiltonian(inst.system);
    inst.integrals.push_back(shipped("I1", Role::cartesian, ref, I1));
    inst.integrals.push_back(shipped("I2", Role::cartesian, ref, I2));
    inst.integrals.push_back(shipped("I3", Role::additional, ref, I3));
    inst.integrals.push_back(shipped("X1", Role::cartesian, "constant field Cartesian combinations", I1 * I1 + MP(gamma) * I3));
    inst.integrals.push_back(shipped("X2", Role::cartesian, "constant field Cartesian combinations",
                                     MP(2.0) * H - I1 * I1 - I2 * I2 - MP(gamma) * I3));
}

Registered const_uniform_b() {
    Registered r;
    r.entry = {"const.uniformB", "constant field", "B = (0, gamma, 0), W = v4 x2^4 + v1 x2",
               {{"gamma", 1.0, false}, {"v1", 1.0, false}, {"v4", 1.0, false}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("gamma")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double gamma = p.at("gamma");
        inst.system = constant_field_system(gamma, mono(p.at("v4"), 4) + mono(p.at("v1"), 1));
        add_constant_field_integrals(inst, gamma);
        inst.explicit_rank = 4;
        default_boxes(inst);
        inst.metadata.push_back({"gamma", fmt(gamma)});
    };
    return r;
}

Registered const_cagedosc() {
    Registered r;
    r.entry = {"const.cagedosc", "caged oscillator", "B = (0, gamma, 0), W = c / x2^2 + (m^2 / (2 ell^2)) gamma^2 x2^2",
               {{"gamma", 1.0, false}, {"c", 1.0, false}, {"ell", 1.0, false}, {"m", 1.0, false}},
               {}, Classification::maximal, 5};
    r.predicates = {nonzero("gamma"), nonzero("ell"), nonzero("m")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double gamma = p.at("gamma"), c = p.at("c"), ell = p.at("ell"), m = p.at("m");
        inst.system = constant_field_system(gamma, mono(c, -2) + mono(m * m / (2.0 * ell * ell) * gamma * gamma, 2));
        add_constant_field_integrals(inst, gamma);
        inst.explicit_rank = 4;
        const double ratio = std::fabs(m / ell);
        const auto q = as_rational(ratio);
        inst.classification = q ? Classification::maximal : Classification::minimal;
        inst.expected_rank = q ? 5 : 4;
        const double g = std::fabs(gamma);
        // Linear modes: X with period 2 pi / gamma; Y with frequency gamma m / ell, halved in
        // period by the barrier when c != 0.
        const double ty = (c != 0.0 ? 1.0 : 2.0) * std::numbers::pi / (g * ratio);
        const double tx = 2.0 * std::numbers::pi / g;
        inst.metadata.push_back({"gamma", fmt(gamma)});
        inst.metadata.push_back({"shortest_period", fmt(std::min(tx, ty))});
        if (q) {
            // ty = (pi / g) * k * den / num with k = 1 (barrier) or 2.
            const long num = q->first, den = q->second;
            const long k = c != 0.0 ? 1 : 2;
            const long lcm = std::lcm(2 * num, k * den);
            inst.metadata.push_back({"closure_period", fmt(std::numbers::pi / g * double(lcm) / double(num))});
        }
        inst.metadata.push_back({"evidence", "extra integral not explicit; closure checked by recurrence"});
        default_boxes(inst);
    };
    return r;
}

Registered const_cagedosc_x5() {
    Registered r;
    r.entry = {"const.cagedosc.x5", "caged oscillator, third-order X5", "B = (0, gamma, 0), W = c / x2^2 + gamma^2 x2^2 / 2",
               {{"gamma", 1.0, false}, {"c", 1.0, true}},
               {}, Classification::maximal, 5};
    r.predicates = {nonzero("gamma")};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double gamma = p.at("gamma"), c = p.at("c");
        const double g2 = gamma * gamma;
        inst.system = constant_field_system(gamma, mono(c, -2) + mono(g2 / 2.0, 2));
        add_constant_field_integrals(inst, gamma);
        const MP X5 =
            MP(2.0 * gamma) * P(1) * P(2) * L(2) +
            MP(g2) * (F(Field::monomial(1.0, {2, 0, 0})) * P(1) * P(1) +
                      F(Field::monomial(1.0, {0, 2, 0})) * (P(2) * P(2) - P(0) * P(0))) +
            F(Field::monomial(2.0 * gamma * g2, {1, 2, 0}) + Field::monomial(4.0 * gamma * c, {1, -2, 0})) * P(2) +
            F(Field::monomial(g2 * g2, {2, 2, 0}) + Field::monomial(2.0 * g2 * c, {2, -2, 0}));
        inst.integrals.push_back(shipped("X5", Role::higher_order, "caged oscillator X5", X5));
        inst.explicit_rank = 5;
        default_boxes(inst);
        inst.metadata.push_back({"gamma", fmt(gamma)});
    };
    return r;
}

// ---------------------------------------------------------------- extended caged oscillator

Registered extcage() {
    Registered r;
    r.entry = {"extcage", "extended caged oscillator",
               "u1 = omega m1 x2^2 + beta1 / x2^2, u2 = -omega l1 x1^2 - alpha1 / x1^2, "
               "V = omega (l2 x1^2 + m2 x2^2) + alpha2 / x1^2 + beta2 / x2^2",
               {{"omega", 1.0, false}, {"l1", 1.0, false}, {"m1", 1.0, false}, {"alpha1", 1.0, false},
                {"beta1", 1.0, false}, {"l2", 1.0, true}, {"m2", 1.0, true}, {"alpha2", 1.0, true},
                {"beta2", 1.0, true}},
               {}, Classification::minimal, 4};
    r.predicates = {nonzero("omega"),
                    {"(l1, m1) != (0, 0) or (l2, m2) != (0, 0)", [](const ParamMap& p) {
                         return p.at("l1") != 0.0 || p.at("m1") != 0.0 || p.at("l2") != 0.0 || p.at("m2") != 0.0;
                     }}};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double om = p.at("omega"), l1 = p.at("l1"), m1 = p.at("m1"), l2 = p.at("l2"), m2 = p.at("m2");
        const double al1 = p.at("alpha1"), al2 = p.at("alpha2"), be1 = p.at("beta1"), be2 = p.at("beta2");
        const CaseOneData d{mono(om * m1, 2) + mono(be1, -2), mono(-om * l1, 2) + mono(-al1, -2),
                            mono(om * l2, 2) + mono(al2, -2), mono(om * m2, 2) + mono(be2, -2)};
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);

        // l^2 / m^2 must not depend on p3 and its square root must be rational.
        std::optional<double> ratio;
        bool consistent = true;
        for (auto [l, m] : {std::pair{l1, m1}, std::pair{l2, m2}}) {
            if (l == 0.0 && m == 0.0) continue;
            if (m == 0.0 || l / m <= 0.0) {
                consistent = false;
                continue;
            }
            if (ratio && std::fabs(*ratio - l / m) > 1e-12 * std::fabs(*ratio)) consistent = false;
            if (!ratio) ratio = l / m;
        }
        bool rational_root = false;
        if (consistent && ratio) {
            if (const auto q = as_rational(*ratio)) rational_root = perfect_square(q->first) && perfect_square(q->second);
        }
        const bool superintegrable = consistent && ratio && rational_root;
        inst.classification = superintegrable ? Classification::minimal : Classification::integrable;
        inst.expected_rank = superintegrable ? 4 : 3;
        inst.explicit_rank = 3;
        if (ratio) inst.metadata.push_back({"frequency_ratio_squared", fmt(*ratio)});
        inst.metadata.push_back({"ratio_condition", superintegrable ? "holds" : "fails"});
        if (superintegrable) inst.metadata.push_back({"classification_note", "minimal as far as known; maximality not excluded"});

        if (l1 == m1 && l2 == m2) {
            // Equal frequencies: the E1 integral with c1 = omega (l1 p3 + l2), c2 = alpha, c3 = beta.
            auto cj = [](double a, double b) { return KP(Field(a)) * KP::kappa() + KP(Field(b)); };
            const KP c2 = cj(al1, al2), c3 = cj(be1, be2);
            const KP x1 = KP::coordinate(0), x2 = KP::coordinate(1);
            const KP L3 = x1 * KP::momentum(1) - x2 * KP::momentum(0);
            const KP I = L3 * L3 + KP(Field(2.0)) * (c2 * KP(Field::monomial(1.0, {-2, 2, 0})) +
                                                     c3 * KP(Field::monomial(1.0, {2, -2, 0})));
            ShippedIntegral X3 =
                shipped("X3", Role::additional, "extended caged oscillator, equal frequencies", lift_integral(I, inst.system.gauge()));
            X3.planar = I;
            inst.integrals.push_back(std::move(X3));
            inst.explicit_rank = 4;
        } else if (superintegrable) {
            inst.metadata.push_back({"note", "additional integral of higher order not shipped"});
        }
        default_boxes(inst);
        inst.start_box.lo[5] = 0.0;
        inst.start_box.hi[5] = 0.5;
    };
    return r;
}

// ---------------------------------------------------------------- constant field, quadratic potential

Registered sec8_quadratic() {
    Registered r;
    r.entry = {"sec8.quadratic", "constant field, quadratic potential",
               "A3 = a1 x2 - a2 x1, V = v11 x1 + v12 x1^2 + v21 x2 + v22 x2^2",
               {{"a1", 1.0, false}, {"a2", 1.0, false}, {"v11", 1.0, true}, {"v12", 1.0, true},
                {"v21", 1.0, true}, {"v22", 1.0, true}},
               {}, Classification::maximal, 5};
    r.predicates = {{"a1 != 0 or a2 != 0", [](const ParamMap& p) { return p.at("a1") != 0.0 || p.at("a2") != 0.0; }}};
    r.build = [](const ParamMap& p, Instance& inst) {
        const double a1 = p.at("a1"), a2 = p.at("a2");
        const double v11 = p.at("v11"), v12 = p.at("v12"), v21 = p.at("v21"), v22 = p.at("v22");
        const CaseOneData d{mono(a1, 1), mono(a2, 1), mono(v11, 1) + mono(v12, 2), mono(v21, 1) + mono(v22, 2)};
        inst.system = MagneticSystem::case_one(d);
        add_case_one_cartesian(inst, d);
        const auto& g = inst.system.gauge();
        int extra = 0;
        if (v12 == v22) {
            inst.integrals.push_back(shipped(
                "X3", Role::additional, "quadratic potential X3",
                canon(g, {{{1, 1, 0}, Field(1.0)},
                          {{0, 0, 1}, Field::monomial(-a2, {0, 1, 0}) + Field::monomial(a1, {1, 0, 0})},
                          {{0, 0, 0}, Field::monomial(v11, {0, 1, 0}) + Field::monomial(v21, {1, 0, 0}) +
                                          Field::monomial(2.0 * v12, {1, 1, 0})}})));
            ++extra;
        }
        if (v12 != 0.0 && v22 != 0.0) {
            const Sec8Info info = sec8_info(a1, a2, v12, v22);
            const Sec8Translation t = sec8_translation(a1, a2, v11, v12, v21, v22);
            inst.metadata.push_back({"kappa3", fmt(info.kappa3)});
            inst.metadata.push_back({"degenerate", info.degenerate ? "true" : "false"});
            inst.metadata.push_back({"inverted", info.inverted ? "true" : "false"});
            inst.metadata.push_back({"p3_drift", fmt(t.p3_coefficient)});
            if (info.degenerate && std::fabs(t.p3_coefficient) <= kDegenerateTolerance) {
                inst.integrals.push_back(shipped(
                    "Z", Role::additional, "cyclic coordinate of the degenerate map",
                    canon(g, {{{0, 0, 0}, Field::coordinate(2)},
                              {{1, 0, 0}, Field(-a2 / (2.0 * v12))},
                              {{0, 1, 0}, Field(a1 / (2.0 * v22))}})));
                ++extra;
            }
        }
        inst.classification = extra == 2 ? Classification::maximal
                              : extra == 1 ? Classification::minimal
                                           : Classification::integrable;
        inst.expected_rank = 3 + extra;
        inst.explicit_rank = 3 + extra;
        default_boxes(inst);
    };
    return r;
}

const std::vector<Registered>& registry() {
    static const std::vector<Registered> r = [] {
        std::vector<Registered> v{case1_generic(), case2_generic(), case1_a(),        table_row(0),
                                  table_row(1),    table_row(2),    case1_d_max(),    case2_a(),
                                  case2_b(),       case2_c(),       case2_d(),        const_uniform_b(),
                                  const_cagedosc(), const_cagedosc_x5(), extcage(),  sec8_quadratic()};
        for (auto& e : v) {
            for (const auto& pr : e.predicates) e.entry.predicates.push_back(pr.text);
        }
        return v;
    }();
    return r;
}

const Registered& registered(const std::string& id) {
    for (const auto& r : registry()) {
        if (r.entry.id == id) return r;
    }
    throw ValidationError("unknown catalog entry '" + id + "'");
}

void validate(const Registered& r, const ParamMap& p) {
    for (const auto& [k, v] : p) {
        if (!std::isfinite(v)) throw ValidationError(r.entry.id + ": parameter " + k + " must be finite");
    }
    for (const auto& pr : r.predicates) {
        if (!pr.holds(p)) throw ValidationError(r.entry.id + ": parameter predicate violated: " + pr.text);
    }
}

}  // namespace

std::string to_string(Classification c) {
    switch (c) {
        case Classification::minimal: return "minimal";
        case Classification::maximal: return "maximal";
        default: return "integrable";
    }
}

std::string to_string(Role r) {
    switch (r) {
        case Role::additional: return "additional";
        case Role::higher_order: return "higher-order";
        default: return "cartesian";
    }
}

std::vector<MomentumPolynomial> Instance::rank_set() const {
    std::vector<MomentumPolynomial> v{MomentumPolynomial::hamiltonian(system)};
    for (const auto& i : integrals) v.push_back(i.poly);
    return v;
}

const ShippedIntegral& Instance::integral(const std::string& name) const {
    for (const auto& i : integrals) {
        if (i.name == name) return i;
    }
    throw std::out_of_range(id + " ships no integral named " + name);
}

std::string Instance::meta(const std::string& key) const {
    for (const auto& [k, v] : metadata) {
        if (k == key) return v;
    }
    return {};
}

const std::vector<CatalogEntry>& list() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        for (const auto& r : registry()) v.push_back(r.entry);
        return v;
    }();
    return entries;
}

const CatalogEntry& find(const std::string& id) { return registered(id).entry; }

ParamMap resolve(const std::string& id, const ParamMap& overrides) {
    const Registered& r = registered(id);
    ParamMap p;
    for (const auto& ps : r.entry.params) p[ps.name] = ps.default_value;
    for (const auto& [k, v] : overrides) {
        if (!p.contains(k)) throw ValidationError(id + ": unknown parameter '" + k + "'");
        p[k] = v;
    }
    validate(r, p);
    return p;
}

Instance instantiate(const std::string& id, const ParamMap& overrides, const std::optional<Perturbation>& perturbation) {
    const Registered& r = registered(id);
    const ParamMap p = resolve(id, overrides);
    auto build = [&](const ParamMap& params) {
        Instance inst;
        inst.id = id;
        inst.params = params;
        inst.classification = r.entry.classification;
        inst.expected_rank = r.entry.expected_rank;
        r.build(params, inst);
        return inst;
    };
    Instance inst = build(p);
    for (auto& I : inst.integrals) {
        if (!I.spec && I.poly.degree() <= 2) I.spec = spec_from_polynomial(I.poly);
    }
    if (perturbation) {
        ParamMap q = p;
        if (!q.contains(perturbation->param)) {
            throw ValidationError(id + ": cannot perturb unknown parameter '" + perturbation->param + "'");
        }
        q[perturbation->param] += perturbation->delta;
        validate(r, q);
        inst.system = build(q).system;
        inst.metadata.push_back({"perturbation", perturbation->param + ":" + fmt(perturbation->delta)});
    }
    return inst;
}

Perturbation parse_perturbation(const std::string& id, const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ValidationError("perturbation must read field:+delta, got '" + text + "'");
    std::string field = text.substr(0, colon);
    const std::string amount = text.substr(colon + 1);
    double delta = 0.0;
    try {
        std::size_t used = 0;
        delta = std::stod(amount, &used);
        if (used != amount.size()) throw std::invalid_argument(amount);
    } catch (const std::exception&) {
        throw ValidationError("perturbation amount '" + amount + "' is not a number");
    }
    const CatalogEntry& e = find(id);
    if (field == "W") {
        const auto it = std::find_if(e.params.begin(), e.params.end(), [](const ParamSpec& s) { return s.w_only; });
        if (it == e.params.end()) throw ValidationError(id + " has no parameter entering W alone");
        field = it->name;
    } else if (std::none_of(e.params.begin(), e.params.end(), [&](const ParamSpec& s) { return s.name == field; })) {
        throw ValidationError(id + ": cannot perturb unknown parameter '" + field + "'");
    }
    return {field, delta};
}

}  // namespace magsep::catalog
