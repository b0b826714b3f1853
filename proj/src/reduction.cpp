#include "magsep/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magsep {

namespace {

double ipow(double v, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
}

Vec3 plane_point(const std::array<double, 4>& z) { return {z[0], z[1], 0.0}; }

void require_planar(const Field& f) {
    if (f.depends_on(2)) throw StructureError("2D coefficient depends on x3");
}

}  // namespace

KappaPolynomial::KappaPolynomial(const Field& scalar) {
    require_planar(scalar);
    if (!scalar.is_zero()) terms_.push_back({0, {0, 0}, scalar});
}

KappaPolynomial KappaPolynomial::term(const Field& coeff, int kappa_power, std::array<int, 2> k) {
    if (kappa_power < 0) throw StructureError("integral depends non-polynomially on kappa");
    if (k[0] < 0 || k[1] < 0) throw std::invalid_argument("negative momentum exponent");
    require_planar(coeff);
    KappaPolynomial r;
    if (!coeff.is_zero()) r.terms_.push_back({kappa_power, k, coeff});
    return r;
}

KappaPolynomial KappaPolynomial::kappa() { return term(Field(1.0), 1, {0, 0}); }

KappaPolynomial KappaPolynomial::momentum(int j) {
    std::array<int, 2> k{0, 0};
    k[j] = 1;
    return term(Field(1.0), 0, k);
}

KappaPolynomial KappaPolynomial::coordinate(int i) { return KappaPolynomial(Field::coordinate(i)); }

double KappaPolynomial::evaluate(double kappa, const std::array<double, 4>& z) const {
    const Vec3 x = plane_point(z);
    double s = 0.0;
    for (const auto& t : terms_) s += t.coeff(x) * ipow(kappa, t.kappa_power) * ipow(z[2], t.k[0]) * ipow(z[3], t.k[1]);
    return s;
}

std::array<double, 4> KappaPolynomial::gradient(double kappa, const std::array<double, 4>& z) const {
    const Vec3 x = plane_point(z);
    std::array<double, 4> g{0.0, 0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        const double kp = ipow(kappa, t.kappa_power);
        const double m = ipow(z[2], t.k[0]) * ipow(z[3], t.k[1]);
        g[0] += t.coeff.d(0)(x) * kp * m;
        g[1] += t.coeff.d(1)(x) * kp * m;
        const double c = t.coeff(x) * kp;
        if (t.k[0] > 0) g[2] += c * t.k[0] * ipow(z[2], t.k[0] - 1) * ipow(z[3], t.k[1]);
        if (t.k[1] > 0) g[3] += c * t.k[1] * ipow(z[2], t.k[0]) * ipow(z[3], t.k[1] - 1);
    }
    return g;
}

int KappaPolynomial::kappa_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.kappa_power);
    return d;
}

std::string KappaPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        std::string piece = "(" + t.coeff.to_string() + ")";
        if (t.kappa_power == 1) piece += "*kappa";
        if (t.kappa_power > 1) piece += "*kappa^" + std::to_string(t.kappa_power);
        for (int j = 0; j < 2; ++j) {
            const std::string name = j == 0 ? "p1" : "p2";
            if (t.k[j] == 1) piece += "*" + name;
            if (t.k[j] > 1) piece += "*" + name + "^" + std::to_string(t.k[j]);
        }
        if (!out.empty()) out += " + ";
        out += piece;
    }
    return out;
}

KappaPolynomial KappaPolynomial::operator-() const {
    KappaPolynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

KappaPolynomial& KappaPolynomial::operator+=(const KappaPolynomial& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

KappaPolynomial operator*(const KappaPolynomial& a, const KappaPolynomial& b) {
    KappaPolynomial r;
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            r.terms_.push_back({s.kappa_power + t.kappa_power, {s.k[0] + t.k[0], s.k[1] + t.k[1]}, s.coeff * t.coeff});
        }
    }
    r.normalize();
    return r;
}

void KappaPolynomial::normalize() {
    auto key = [](const Term& t) { return std::array<int, 3>{t.kappa_power, t.k[0], t.k[1]}; };
    std::stable_sort(terms_.begin(), terms_.end(), [&](const Term& a, const Term& b) { return key(a) < key(b); });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && key(merged.back()) == key(t)) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
    terms_ = std::move(merged);
}

std::string Reduced2DSystem::to_string() const {
    std::ostringstream os;
    os.precision(12);
    os << "H0(kappa=" << kappa << ") = " << hamiltonian.to_string();
    return os.str();
}

Reduced2DSystem reduce_caseI(const MagneticSystem& sys, double kappa, const std::string& source) {
    const auto& d = sys.case_one_data();
    if (sys.separation() != Separation::case_one || !d) {
        throw StructureError("reduction in kappa needs a Case I system");
    }
    Reduced2DSystem r;
    r.kappa = kappa;
    r.source = source;
    const Field A3 = Field::on_axis(d->u1, 1) - Field::on_axis(d->u2, 0);
    const Field V = Field::on_axis(d->V1, 0) + Field::on_axis(d->V2, 1);
    r.hamiltonian = KappaPolynomial::term(Field(0.5), 0, {2, 0}) + KappaPolynomial::term(Field(0.5), 0, {0, 2}) +
                    KappaPolynomial::term(A3, 1, {0, 0}) + KappaPolynomial(V);
    return r;
}

MomentumPolynomial lift_integral(const KappaPolynomial& I2d, const GaugePotential& gauge) {
    std::vector<std::pair<MultiIndex, Field>> terms;
    for (const auto& t : I2d.terms()) terms.push_back({{t.k[0], t.k[1], t.kappa_power}, t.coeff});
    return MomentumPolynomial::from_canonical(terms, gauge);
}

double poisson_2d(const KappaPolynomial& f, const KappaPolynomial& g, double kappa, const std::array<double, 4>& z) {
    const auto a = f.gradient(kappa, z);
    const auto b = g.gradient(kappa, z);
    return (a[0] * b[2] - b[0] * a[2]) + (a[1] * b[3] - b[1] * a[3]);
}

AffineMap AffineMap::identity() {
    AffineMap m;
    for (int i = 0; i < 6; ++i) m.M[i][i] = 1.0;
    return m;
}

PhasePoint AffineMap::operator()(const PhasePoint& pt) const {
    const Vec6 z = pt.as_vector();
    Vec6 out = offset;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) out[i] += M[i][j] * z[j];
    }
    return PhasePoint::from_vector(out);
}

AffineMap AffineMap::then(const AffineMap& outer) const {
    AffineMap r;
    for (int i = 0; i < 6; ++i) {
        r.offset[i] = outer.offset[i];
        for (int j = 0; j < 6; ++j) {
            r.offset[i] += outer.M[i][j] * offset[j];
            for (int k = 0; k < 6; ++k) r.M[i][j] += outer.M[i][k] * M[k][j];
        }
    }
    return r;
}

double symplectic_residual(const std::array<std::array<double, 6>, 6>& J) {
    // Omega pairs x_i with p_i.
    auto omega = [](int i, int j) {
        if (i < 3 && j == i + 3) return 1.0;
        if (i >= 3 && j == i - 3) return -1.0;
        return 0.0;
    };
    double worst = 0.0;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            double s = 0.0;
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) s += J[i][a] * omega(i, j) * J[j][b];
            }
            worst = std::max(worst, std::fabs(s - omega(a, b)));
        }
    }
    return worst;
}

std::array<std::array<double, 6>, 6> finite_difference_jacobian(const AffineMap& map, const PhasePoint& at,
                                                               double step) {
    std::array<std::array<double, 6>, 6> J{};
    const Vec6 z = at.as_vector();
    for (int j = 0; j < 6; ++j) {
        Vec6 zp = z, zm = z;
        zp[j] += step;
        zm[j] -= step;
        const Vec6 fp = map(PhasePoint::from_vector(zp)).as_vector();
        const Vec6 fm = map(PhasePoint::from_vector(zm)).as_vector();
        for (int i = 0; i < 6; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * step);
    }
    return J;
}

AffineMap prop32_affine(double gamma) {
    if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be nonzero");
    AffineMap m = AffineMap::identity();
    m.M[0][5] = 1.0 / gamma;
    m.M[2][3] = 1.0 / gamma;
    return m;
}

PhasePoint prop32_map(double gamma, const PhasePoint& pt_new) { return prop32_affine(gamma)(pt_new); }

double prop32_hamiltonian(const MagneticSystem& sys, double gamma, const PhasePoint& pt_new) {
    const Field& W = sys.effective_potential();
    if (W.depends_on(0) || W.depends_on(2)) {
        throw StructureError("the effective potential must depend on x2 only");
    }
    const auto& P = pt_new.p;
    const double X = pt_new.x[0];
    return 0.5 * (P[0] * P[0] + P[1] * P[1]) + 0.5 * gamma * gamma * X * X + W({0.0, pt_new.x[1], 0.0});
}

Sec8Info sec8_info(double a1, double a2, double v12, double v22) {
    if (v12 == 0.0 || v22 == 0.0) throw std::invalid_argument("the map needs v12 != 0 and v22 != 0");
    Sec8Info info;
    info.kappa3 = 1.0 - a1 * a1 / (2.0 * v22) - a2 * a2 / (2.0 * v12);
    info.degenerate = std::fabs(info.kappa3) <= kDegenerateTolerance;
    info.inverted = !info.degenerate && info.kappa3 < 0.0;
    info.lambda = info.degenerate ? 0.0 : std::sqrt(std::fabs(info.kappa3));
    return info;
}

AffineMap sec8_affine(double a1, double a2, double v12, double v22) {
    if (v12 == 0.0 || v22 == 0.0) throw std::invalid_argument("the map needs v12 != 0 and v22 != 0");
    AffineMap m = AffineMap::identity();
    m.M[0][5] = a2 / (2.0 * v12);
    m.M[1][5] = -a1 / (2.0 * v22);
    m.M[2][3] = a2 / (2.0 * v12);
    m.M[2][4] = -a1 / (2.0 * v22);
    return m;
}

PhasePoint sec8_map(double a1, double a2, double v12, double v22, const PhasePoint& pt_new) {
    return sec8_affine(a1, a2, v12, v22)(pt_new);
}

Sec8Translation sec8_translation(double a1, double a2, double v11, double v12, double v21, double v22) {
    if (v12 == 0.0 || v22 == 0.0) throw std::invalid_argument("the translation needs v12 != 0 and v22 != 0");
    const double d1 = v11 / (2.0 * v12);
    const double d2 = v21 / (2.0 * v22);
    Sec8Translation t;
    t.map = AffineMap::identity();
    t.map.offset[0] = -d1;
    t.map.offset[1] = -d2;
    t.energy_offset = -v11 * v11 / (4.0 * v12) - v21 * v21 / (4.0 * v22);
    t.p3_coefficient = a2 * d1 - a1 * d2;
    return t;
}

AffineMap p3_scaling(double lambda) {
    if (lambda == 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonzero");
    AffineMap m = AffineMap::identity();
    m.M[2][2] = lambda;
    m.M[5][5] = 1.0 / lambda;
    return m;
}

double sec8_hamiltonian(double kappa3, double v12, double v22, const PhasePoint& pt_new) {
    const auto& P = pt_new.p;
    const double X = pt_new.x[0], Y = pt_new.x[1];
    return 0.5 * (P[0] * P[0] + P[1] * P[1] + kappa3 * P[2] * P[2]) + v12 * X * X + v22 * Y * Y;
}

}  // namespace magsep
