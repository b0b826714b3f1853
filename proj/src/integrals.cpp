#include "magsep/integrals.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magsep {

namespace {

using MP = MomentumPolynomial;

struct GeneratorSet {
    std::array<MP, 3> p;
    std::array<MP, 3> l;
};

const GeneratorSet& generators() {
    static const GeneratorSet g = [] {
        GeneratorSet s;
        for (int j = 0; j < 3; ++j) {
            s.p[j] = MP::momentum(j);
            s.l[j] = MP::angular(j);
        }
        return s;
    }();
    return g;
}

LeadingFields fields_of(const MP& quad) {
    LeadingFields f;
    f.h[0] = quad.coefficient({2, 0, 0});
    f.h[1] = quad.coefficient({0, 2, 0});
    f.h[2] = quad.coefficient({0, 0, 2});
    f.n[0] = quad.coefficient({0, 1, 1});
    f.n[1] = quad.coefficient({1, 0, 1});
    f.n[2] = quad.coefficient({1, 1, 0});
    return f;
}

enum class Slot { alpha, beta, gamma };

struct Unknown {
    Slot slot;
    int i, j;
};

const std::vector<Unknown>& unknowns() {
    static const std::vector<Unknown> u = [] {
        std::vector<Unknown> v;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) v.push_back({Slot::alpha, i, j});
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (!(i == 1 && j == 1)) v.push_back({Slot::beta, i, j});
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) v.push_back({Slot::gamma, i, j});
        }
        return v;
    }();
    return u;
}

MP generator_product(const Unknown& u) {
    const auto& g = generators();
    switch (u.slot) {
        case Slot::alpha: return g.l[u.i] * g.l[u.j];
        case Slot::beta: return g.p[u.i] * g.l[u.j];
        default: return g.p[u.i] * g.p[u.j];
    }
}

double& slot_ref(QuadraticIntegralSpec& s, const Unknown& u) {
    switch (u.slot) {
        case Slot::alpha: return s.alpha[u.i][u.j];
        case Slot::beta: return s.beta[u.i][u.j];
        default: return s.gamma[u.i][u.j];
    }
}

double value_of(const QuadraticIntegralSpec& s, const Unknown& u) {
    switch (u.slot) {
        case Slot::alpha: return s.alpha[u.i][u.j];
        case Slot::beta: return s.beta[u.i][u.j];
        default: return s.gamma[u.i][u.j];
    }
}

const std::vector<std::array<Field, 6>>& unknown_fields() {
    static const std::vector<std::array<Field, 6>> f = [] {
        std::vector<std::array<Field, 6>> out;
        for (const auto& u : unknowns()) {
            const LeadingFields lf = fields_of(generator_product(u));
            out.push_back({lf.h[0], lf.h[1], lf.h[2], lf.n[0], lf.n[1], lf.n[2]});
        }
        return out;
    }();
    return f;
}

double sum_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

}  // namespace

MP leading_polynomial(const QuadraticIntegralSpec& spec) {
    MP r;
    for (const auto& u : unknowns()) {
        const double c = value_of(spec, u);
        if (c != 0.0) r += MP(c) * generator_product(u);
    }
    if (spec.beta[1][1] != 0.0) r += MP(spec.beta[1][1]) * generator_product({Slot::beta, 1, 1});
    return r;
}

LeadingFields leading_fields(const QuadraticIntegralSpec& spec) { return fields_of(leading_polynomial(spec)); }

LeadingCoefficients leading_from_constants(const QuadraticIntegralSpec& spec, const Vec3& x) {
    const LeadingFields f = leading_fields(spec);
    LeadingCoefficients c;
    for (int j = 0; j < 3; ++j) {
        c.h[j] = f.h[j](x);
        c.n[j] = f.n[j](x);
    }
    return c;
}

MP to_polynomial(const QuadraticIntegralSpec& spec) {
    MP r = leading_polynomial(spec);
    for (int j = 0; j < 3; ++j) r += MP(spec.s[j]) * MP::momentum(j);
    r += MP(spec.m);
    return r;
}

QuadraticIntegralSpec spec_from_polynomial(const MP& X) {
    if (X.degree() > 2) throw std::invalid_argument("polynomial is not of second order");
    const LeadingFields lf = fields_of(X.homogeneous_part(2));
    const std::array<Field, 6> target{lf.h[0], lf.h[1], lf.h[2], lf.n[0], lf.n[1], lf.n[2]};
    const auto& uf = unknown_fields();
    const int nu = int(uf.size());

    // The generator products are polynomials of degree <= 2 in x; a fixed set of generic
    // points determines the constants.
    static const std::array<Vec3, 8> nodes{{{0.31, -0.72, 0.55},
                                            {-0.43, 0.27, -0.91},
                                            {0.88, 0.64, 0.12},
                                            {-0.19, -0.36, 0.78},
                                            {0.57, -0.15, -0.44},
                                            {-0.82, 0.93, 0.29},
                                            {0.23, 0.47, -0.66},
                                            {-0.61, -0.58, -0.17}}};
    const int rows = int(nodes.size()) * 6;
    Eigen::MatrixXd M(rows, nu);
    Eigen::VectorXd b(rows);
    for (int k = 0; k < int(nodes.size()); ++k) {
        for (int c = 0; c < 6; ++c) {
            const int r = 6 * k + c;
            for (int u = 0; u < nu; ++u) M(r, u) = uf[u][c](nodes[k]);
            b(r) = target[c](nodes[k]);
        }
    }
    const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(b);
    const double err = (M * sol - b).norm();
    if (!(err <= 1e-9 * (1.0 + b.norm()))) {
        throw std::invalid_argument("quadratic terms are not products of Euclidean generators");
    }
    QuadraticIntegralSpec spec;
    for (int u = 0; u < nu; ++u) {
        double v = sol(u);
        if (std::fabs(v) < 1e-14) v = 0.0;
        slot_ref(spec, unknowns()[u]) = v;
    }
    spec.s = {X.coefficient({1, 0, 0}), X.coefficient({0, 1, 0}), X.coefficient({0, 0, 1})};
    spec.m = X.coefficient({0, 0, 0});
    return spec;
}

double NamedResidual::normalized() const { return std::fabs(value) / (1.0 + scale); }

std::vector<NamedResidual> third_order_residuals(const LeadingFields& lf, const Vec3& x) {
    const auto& h = lf.h;
    const auto& n = lf.n;
    auto pair = [&](const char* name, const Field& a, const Field& b) {
        const double va = a(x), vb = b(x);
        return NamedResidual{name, va + vb, std::fabs(va) + std::fabs(vb)};
    };
    std::vector<NamedResidual> r;
    r.push_back(pair("3ord-11", h[0].d(0), Field()));
    r.push_back(pair("3ord-12", h[0].d(1), n[2].d(0)));
    r.push_back(pair("3ord-13", h[0].d(2), n[1].d(0)));
    r.push_back(pair("3ord-21", h[1].d(0), n[2].d(1)));
    r.push_back(pair("3ord-22", h[1].d(1), Field()));
    r.push_back(pair("3ord-23", h[1].d(2), n[0].d(1)));
    r.push_back(pair("3ord-31", h[2].d(0), n[1].d(2)));
    r.push_back(pair("3ord-32", h[2].d(1), n[0].d(2)));
    r.push_back(pair("3ord-33", h[2].d(2), Field()));
    const double d0 = n[0].d(0)(x), d1 = n[1].d(1)(x), d2 = n[2].d(2)(x);
    r.push_back({"3ord-div", d0 + d1 + d2, std::fabs(d0) + std::fabs(d1) + std::fabs(d2)});
    return r;
}

DeterminingEquations::DeterminingEquations(const MagneticSystem& sys, const QuadraticIntegralSpec& spec)
    : sys_(&sys) {
    const LeadingFields lf = leading_fields(spec);
    const auto& h = lf.h;
    const auto& n = lf.n;
    const auto& s = spec.s;
    const Field& m = spec.m;
    const auto& B = sys.magnetic_field();
    const auto dW = gradient(sys.effective_potential());
    const Field two(2.0);

    // Right-hand sides of the second-order block.
    const Field R11 = n[1] * B[1] - n[2] * B[2];
    const Field R22 = n[2] * B[2] - n[0] * B[0];
    const Field R33 = n[0] * B[0] - n[1] * B[1];
    const Field R12 = n[0] * B[1] - n[1] * B[0] + two * (h[0] - h[1]) * B[2];
    const Field R13 = n[2] * B[0] - n[0] * B[2] + two * (h[2] - h[0]) * B[1];
    const Field R23 = n[1] * B[2] - n[2] * B[1] + two * (h[1] - h[2]) * B[0];

    determining_.push_back({"2ord-1", {s[0].d(0)}, {n[1] * B[1], -(n[2] * B[2])}});
    determining_.push_back({"2ord-2", {s[1].d(1)}, {n[2] * B[2], -(n[0] * B[0])}});
    determining_.push_back({"2ord-3", {s[2].d(2)}, {n[0] * B[0], -(n[1] * B[1])}});
    determining_.push_back(
        {"2ord-4", {s[0].d(1), s[1].d(0)}, {n[0] * B[1], -(n[1] * B[0]), two * (h[0] - h[1]) * B[2]}});
    determining_.push_back(
        {"2ord-5", {s[0].d(2), s[2].d(0)}, {n[2] * B[0], -(n[0] * B[2]), two * (h[2] - h[0]) * B[1]}});
    determining_.push_back(
        {"2ord-6", {s[2].d(1), s[1].d(2)}, {n[1] * B[2], -(n[2] * B[1]), two * (h[1] - h[2]) * B[0]}});

    const std::array<std::vector<Field>, 3> F{
        std::vector<Field>{two * h[0] * dW[0], n[2] * dW[1], n[1] * dW[2], s[2] * B[1], -(s[1] * B[2])},
        std::vector<Field>{n[2] * dW[0], two * h[1] * dW[1], n[0] * dW[2], s[0] * B[2], -(s[2] * B[0])},
        std::vector<Field>{n[1] * dW[0], n[0] * dW[1], two * h[2] * dW[2], s[1] * B[0], -(s[0] * B[1])}};
    for (int i = 0; i < 3; ++i) {
        determining_.push_back({"1ord-" + std::to_string(i + 1), {m.d(i)}, F[i]});
    }
    determining_.push_back({"0ord", {s[0] * dW[0], s[1] * dW[1], s[2] * dW[2]}, {}});

    auto dd = [](const Field& f, int a, int b) { return f.d(a).d(b); };
    compat_.push_back({"comp-1", {dd(R11, 1, 1), dd(R22, 0, 0)}, {dd(R12, 0, 1)}});
    compat_.push_back({"comp-2", {dd(R11, 2, 2), dd(R33, 0, 0)}, {dd(R13, 0, 2)}});
    compat_.push_back({"comp-3", {dd(R22, 2, 2), dd(R33, 1, 1)}, {dd(R23, 1, 2)}});
    compat_.push_back({"comp-4", {dd(R12, 0, 2)}, {two * dd(R11, 1, 2), -dd(R13, 0, 1), dd(R23, 0, 0)}});
    compat_.push_back({"comp-5", {dd(R12, 1, 2)}, {two * dd(R22, 0, 2), -dd(R23, 0, 1), dd(R13, 1, 1)}});
    compat_.push_back({"comp-6", {dd(R13, 1, 2)}, {two * dd(R33, 0, 1), -dd(R23, 0, 2), dd(R12, 2, 2)}});

    auto sum = [](const std::vector<Field>& v) {
        Field r;
        for (const auto& f : v) r += f;
        return r;
    };
    const std::array<Field, 3> Fs{sum(F[0]), sum(F[1]), sum(F[2])};
    const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& [i, j] : pairs) {
        compat_.push_back(
            {"compm-" + std::to_string(i + 1) + std::to_string(j + 1), {Fs[i].d(j)}, {Fs[j].d(i)}});
    }
}

NamedResidual DeterminingEquations::eval(const Equation& e, const Vec3& x) const {
    std::vector<double> l, r;
    for (const auto& f : e.lhs) l.push_back(f(x));
    for (const auto& f : e.rhs) r.push_back(f(x));
    double sl = 0.0, sr = 0.0;
    for (double v : l) sl += v;
    for (double v : r) sr += v;
    return {e.name, sl - sr, sum_abs(l) + sum_abs(r)};
}

std::vector<NamedResidual> DeterminingEquations::residuals(const Vec3& x) const {
    sys_->check_admissible(x);
    std::vector<NamedResidual> out;
    for (const auto& e : determining_) out.push_back(eval(e, x));
    return out;
}

std::vector<NamedResidual> DeterminingEquations::compatibility(const Vec3& x) const {
    sys_->check_admissible(x);
    std::vector<NamedResidual> out;
    for (const auto& e : compat_) out.push_back(eval(e, x));
    return out;
}

std::vector<NamedResidual> determining_residuals(const MagneticSystem& sys, const QuadraticIntegralSpec& spec,
                                                 const Vec3& x) {
    return DeterminingEquations(sys, spec).residuals(x);
}

std::vector<NamedResidual> compatibility_residuals(const MagneticSystem& sys, const QuadraticIntegralSpec& spec,
                                                   const Vec3& x) {
    return DeterminingEquations(sys, spec).compatibility(x);
}

double bracket_residual(const MagneticSystem& sys, const MP& I, const std::vector<PhasePoint>& points) {
    if (points.empty()) throw std::invalid_argument("bracket_residual needs at least one admissible point");
    double worst = 0.0;
    for (const auto& pt : points) {
        const Vec6 gh = hamiltonian_gradient(sys, pt);
        const Vec6 gi = I.gradient(sys, pt);
        double nh = 0.0, ni = 0.0;
        for (int k = 0; k < 6; ++k) {
            nh += gh[k] * gh[k];
            ni += gi[k] * gi[k];
        }
        const double r = std::fabs(poisson_from_gradients(gh, gi)) / (1.0 + std::sqrt(nh * ni));
        worst = std::max(worst, r);
    }
    return worst;
}

DependenceFit dependence_fit(const MP& target, const std::vector<MP>& basis, const MagneticSystem& sys,
                             const std::vector<PhasePoint>& points) {
    const int nb = int(basis.size());
    const int np = int(points.size());
    if (nb == 0) throw std::invalid_argument("dependence_fit needs a non-empty basis");
    if (np < 2 * nb) throw std::invalid_argument("dependence_fit needs at least twice as many points as basis functions");
    Eigen::MatrixXd M(np, nb);
    Eigen::VectorXd t(np);
    for (int r = 0; r < np; ++r) {
        for (int c = 0; c < nb; ++c) M(r, c) = basis[c].evaluate(sys, points[r]);
        t(r) = target.evaluate(sys, points[r]);
    }
    Eigen::VectorXd scale(nb);
    for (int c = 0; c < nb; ++c) {
        scale(c) = M.col(c).norm();
        if (scale(c) == 0.0) throw std::runtime_error("rank-deficient design (a basis function vanishes on the sample); use more or different points");
        M.col(c) /= scale(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    qr.setThreshold(1e-12);
    if (qr.rank() < nb) throw std::runtime_error("rank-deficient design; use more sample points");
    const Eigen::VectorXd c = qr.solve(t);
    DependenceFit fit;
    for (int k = 0; k < nb; ++k) fit.coefficients.push_back(c(k) / scale(k));
    const double rn = (M * c - t).norm();
    const double tn = t.norm();
    fit.residual = tn > 0.0 ? rn / tn : rn;
    return fit;
}

}  // namespace magsep
