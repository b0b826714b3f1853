#include "magsep/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace magsep {

namespace {

double ipow(double v, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= v;
    return r;
}

double monomial_value(const Vec3& q, const MultiIndex& k) {
    return ipow(q[0], k[0]) * ipow(q[1], k[1]) * ipow(q[2], k[2]);
}

int weight(const MultiIndex& k) { return k[0] + k[1] + k[2]; }

}  // namespace

MomentumPolynomial::MomentumPolynomial(const Field& scalar) {
    if (!scalar.is_zero()) terms_.push_back({{0, 0, 0}, scalar, {}});
    normalize();
}

MomentumPolynomial MomentumPolynomial::monomial(const Field& coeff, const MultiIndex& k) {
    MomentumPolynomial r;
    if (weight(k) > kMaxMomentumDegree) throw std::invalid_argument("momentum degree exceeds 4");
    for (int v : k) {
        if (v < 0) throw std::invalid_argument("negative momentum exponent");
    }
    if (!coeff.is_zero()) r.terms_.push_back({k, coeff, {}});
    r.normalize();
    return r;
}

MomentumPolynomial MomentumPolynomial::momentum(int j) {
    MultiIndex k{0, 0, 0};
    k[j] = 1;
    return monomial(Field(1.0), k);
}

MomentumPolynomial MomentumPolynomial::coordinate(int i) { return MomentumPolynomial(Field::coordinate(i)); }

MomentumPolynomial MomentumPolynomial::canonical_momentum(int j, const GaugePotential& gauge) {
    return momentum(j) - MomentumPolynomial(gauge.A[j]);
}

MomentumPolynomial MomentumPolynomial::angular(int j) {
    const int k = (j + 1) % 3;
    const int l = (j + 2) % 3;
    return coordinate(k) * momentum(l) - coordinate(l) * momentum(k);
}

MomentumPolynomial MomentumPolynomial::hamiltonian(const MagneticSystem& sys) {
    MomentumPolynomial h(sys.effective_potential());
    for (int j = 0; j < 3; ++j) {
        MultiIndex k{0, 0, 0};
        k[j] = 2;
        h += monomial(Field(0.5), k);
    }
    return h;
}

MomentumPolynomial MomentumPolynomial::from_canonical(const std::vector<std::pair<MultiIndex, Field>>& terms,
                                                     const GaugePotential& gauge) {
    std::array<MomentumPolynomial, 3> p;
    for (int j = 0; j < 3; ++j) p[j] = canonical_momentum(j, gauge);
    MomentumPolynomial r;
    for (const auto& [k, c] : terms) {
        MomentumPolynomial t(c);
        for (int j = 0; j < 3; ++j) {
            for (int e = 0; e < k[j]; ++e) t = t * p[j];
        }
        r += t;
    }
    return r;
}

int MomentumPolynomial::degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, weight(t.k));
    return d;
}

Field MomentumPolynomial::coefficient(const MultiIndex& k) const {
    for (const auto& t : terms_) {
        if (t.k == k) return t.coeff;
    }
    return Field();
}

MomentumPolynomial MomentumPolynomial::homogeneous_part(int degree) const {
    MomentumPolynomial r;
    for (const auto& t : terms_) {
        if (weight(t.k) == degree) r.terms_.push_back(t);
    }
    return r;
}

std::string MomentumPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    static const char* names[] = {"pA1", "pA2", "pA3"};
    for (const auto& t : terms_) {
        std::string piece = "(" + t.coeff.to_string() + ")";
        for (int j = 0; j < 3; ++j) {
            if (t.k[j] == 1) piece += std::string("*") + names[j];
            if (t.k[j] > 1) piece += std::string("*") + names[j] + "^" + std::to_string(t.k[j]);
        }
        if (!out.empty()) out += " + ";
        out += piece;
    }
    return out;
}

double MomentumPolynomial::evaluate_covariant(const Vec3& x, const Vec3& q) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coeff(x) * monomial_value(q, t.k);
    return s;
}

double MomentumPolynomial::evaluate(const MagneticSystem& sys, const PhasePoint& pt) const {
    return evaluate_covariant(pt.x, covariant_momentum(pt, sys));
}

Vec6 MomentumPolynomial::gradient(const MagneticSystem& sys, const PhasePoint& pt) const {
    const Vec3 q = covariant_momentum(pt, sys);
    Vec3 dq{0.0, 0.0, 0.0};
    Vec3 dx{0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        const double c = t.coeff(pt.x);
        for (int j = 0; j < 3; ++j) {
            if (t.k[j] == 0) continue;
            MultiIndex k = t.k;
            k[j] -= 1;
            dq[j] += c * t.k[j] * monomial_value(q, k);
        }
        const double mono = monomial_value(q, t.k);
        for (int i = 0; i < 3; ++i) {
            if (!t.dcoeff[i].is_zero()) dx[i] += t.dcoeff[i](pt.x) * mono;
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const Field& d = sys.dA(i, j);
            if (!d.is_zero() && dq[j] != 0.0) dx[i] += dq[j] * d(pt.x);
        }
    }
    return {dx[0], dx[1], dx[2], dq[0], dq[1], dq[2]};
}

MomentumPolynomial MomentumPolynomial::operator-() const {
    MomentumPolynomial r = *this;
    for (auto& t : r.terms_) {
        t.coeff = -t.coeff;
        for (auto& d : t.dcoeff) d = -d;
    }
    return r;
}

MomentumPolynomial& MomentumPolynomial::operator+=(const MomentumPolynomial& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

MomentumPolynomial& MomentumPolynomial::operator-=(const MomentumPolynomial& o) { return *this += -o; }

MomentumPolynomial operator*(const MomentumPolynomial& a, const MomentumPolynomial& b) {
    MomentumPolynomial r;
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            const MultiIndex k{s.k[0] + t.k[0], s.k[1] + t.k[1], s.k[2] + t.k[2]};
            if (weight(k) > kMaxMomentumDegree) throw std::invalid_argument("momentum degree exceeds 4");
            r.terms_.push_back({k, s.coeff * t.coeff, {}});
        }
    }
    r.normalize();
    return r;
}

void MomentumPolynomial::normalize() {
    std::stable_sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.k < b.k; });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().k == t.k) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
    for (auto& t : merged) t.dcoeff = magsep::gradient(t.coeff);
    terms_ = std::move(merged);
}

double evaluate(const MomentumPolynomial& I, const MagneticSystem& sys, const PhasePoint& pt) {
    return I.evaluate(sys, pt);
}

double poisson_from_gradients(const Vec6& f, const Vec6& g) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += f[j] * g[3 + j] - g[j] * f[3 + j];
    return s;
}

double poisson(const MomentumPolynomial& f, const MomentumPolynomial& g, const MagneticSystem& sys,
               const PhasePoint& pt) {
    return poisson_from_gradients(f.gradient(sys, pt), g.gradient(sys, pt));
}

}  // namespace magsep
