#include "magsep/core.hpp"

#include <cmath>
#include <sstream>

namespace magsep {

namespace {

Field half_square_norm(const std::array<Field, 3>& a) {
    Field s;
    for (const auto& c : a) s += c * c;
    return Field(0.5) * s;
}

void merge_flags(std::array<bool, 3>& acc, const std::array<bool, 3>& f) {
    for (int i = 0; i < 3; ++i) acc[i] = acc[i] || f[i];
}

}  // namespace

bool PhasePoint::finite() const {
    for (double v : as_vector()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::array<Field, 3> GaugePotential::curl() const {
    return {A[2].d(1) - A[1].d(2), A[0].d(2) - A[2].d(0), A[1].d(0) - A[0].d(1)};
}

MagneticSystem::MagneticSystem(GaugePotential gauge, Field scalar_potential)
    : gauge_(std::move(gauge)), V_(std::move(scalar_potential)) {
    W_ = V_ - half_square_norm(gauge_.A);
    B_ = gauge_.curl();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) dA_[i][j] = gauge_.A[j].d(i);
        dW_[i] = W_.d(i);
    }
    for (const auto& a : gauge_.A) {
        merge_flags(singular_, a.singular_axes());
        merge_flags(positive_, a.positive_axes());
    }
    merge_flags(singular_, V_.singular_axes());
    merge_flags(positive_, V_.positive_axes());
}

MagneticSystem MagneticSystem::case_one(const CaseOneData& d) {
    GaugePotential g;
    g.A[2] = Field::on_axis(d.u1, 1) - Field::on_axis(d.u2, 0);
    MagneticSystem s(g, Field::on_axis(d.V1, 0) + Field::on_axis(d.V2, 1));
    s.separation_ = Separation::case_one;
    s.case_one_ = d;
    return s;
}

MagneticSystem MagneticSystem::case_two(const CaseTwoData& d) {
    GaugePotential g;
    g.A[1] = Field::on_axis(d.u3, 0);
    g.A[2] = -Field::on_axis(d.u2, 0);
    MagneticSystem s(g, Field::on_axis(d.V1, 0));
    s.separation_ = Separation::case_two;
    s.case_two_ = d;
    return s;
}

Vec3 MagneticSystem::B(const Vec3& x) const {
    check_admissible(x);
    return {B_[0](x), B_[1](x), B_[2](x)};
}

Vec3 MagneticSystem::grad_W(const Vec3& x) const { return {dW_[0](x), dW_[1](x), dW_[2](x)}; }

bool MagneticSystem::admissible(const Vec3& x) const {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(x[i])) return false;
        if (positive_[i] && !(x[i] >= kSingularGuard)) return false;
        if (singular_[i] && std::fabs(x[i]) < kSingularGuard) return false;
    }
    return true;
}

void MagneticSystem::check_admissible(const Vec3& x) const {
    for (int i = 0; i < 3; ++i) {
        std::ostringstream os;
        os.precision(17);
        if (!std::isfinite(x[i])) {
            os << axis_name(i) << " is not finite";
            throw DomainError(os.str());
        }
        if (positive_[i] && !(x[i] >= kSingularGuard)) {
            os << axis_name(i) << " = " << x[i] << " is outside the domain " << axis_name(i) << " >= "
               << kSingularGuard;
            throw DomainError(os.str());
        }
        if (singular_[i] && std::fabs(x[i]) < kSingularGuard) {
            os << axis_name(i) << " = " << x[i] << " is within " << kSingularGuard << " of the singular plane "
               << axis_name(i) << " = 0";
            throw DomainError(os.str());
        }
    }
}

Vec3 covariant_momentum(const PhasePoint& pt, const GaugePotential& gauge) {
    const Vec3 a = gauge(pt.x);
    return {pt.p[0] + a[0], pt.p[1] + a[1], pt.p[2] + a[2]};
}

Vec3 covariant_momentum(const PhasePoint& pt, const MagneticSystem& sys) {
    sys.check_admissible(pt.x);
    return covariant_momentum(pt, sys.gauge());
}

Vec3 curl(const GaugePotential& gauge, const Vec3& x) {
    const auto b = gauge.curl();
    return {b[0](x), b[1](x), b[2](x)};
}

double hamiltonian(const MagneticSystem& sys, const PhasePoint& pt) {
    const Vec3 q = covariant_momentum(pt, sys);
    return 0.5 * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) + sys.W(pt.x);
}

double hamiltonian_gauge_form(const MagneticSystem& sys, const PhasePoint& pt) {
    sys.check_admissible(pt.x);
    const Vec3 a = sys.gauge()(pt.x);
    const Vec3& p = pt.p;
    return 0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) + (a[0] * p[0] + a[1] * p[1] + a[2] * p[2]) +
           sys.V(pt.x);
}

Vec6 hamiltonian_gradient(const MagneticSystem& sys, const PhasePoint& pt) {
    const Vec3 q = covariant_momentum(pt, sys);
    Vec6 g{};
    for (int i = 0; i < 3; ++i) {
        double s = sys.dW(i)(pt.x);
        for (int j = 0; j < 3; ++j) {
            const Field& d = sys.dA(i, j);
            if (!d.is_zero()) s += q[j] * d(pt.x);
        }
        g[i] = s;
        g[3 + i] = q[i];
    }
    return g;
}

MagneticSystem gauge_transform(const MagneticSystem& sys, const Field& chi) {
    GaugePotential g = sys.gauge();
    for (int i = 0; i < 3; ++i) g.A[i] += chi.d(i);
    return MagneticSystem(g, sys.effective_potential() + half_square_norm(g.A));
}

PhasePoint shift_momenta(const PhasePoint& pt, const Field& chi) {
    PhasePoint r = pt;
    for (int i = 0; i < 3; ++i) r.p[i] -= chi.d(i)(pt.x);
    return r;
}

}  // namespace magsep
