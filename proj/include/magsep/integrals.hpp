#pragma once

#include <array>
#include <string>
#include <vector>

#include "magsep/polynomial.hpp"

namespace magsep {

using Mat3 = std::array<std::array<double, 3>, 3>;

// X = sum_{i<=j} alpha_ij l_i l_j + sum beta_ij p_i l_j + sum_{i<=j} gamma_ij p_i p_j + s.p + m,
// all momenta covariant. Only the upper triangles of alpha and gamma are read; beta_22 = 0 by
// convention since p.l = 0.
struct QuadraticIntegralSpec {
    Mat3 alpha{};
    Mat3 beta{};
    Mat3 gamma{};
    std::array<Field, 3> s;
    Field m;

    bool is_reduced() const { return gamma[0][0] == 0.0 && gamma[1][1] == 0.0 && gamma[2][2] == 0.0; }
};

struct LeadingCoefficients {
    Vec3 h{};
    Vec3 n{};
};

struct LeadingFields {
    std::array<Field, 3> h;
    std::array<Field, 3> n;
};

MomentumPolynomial leading_polynomial(const QuadraticIntegralSpec& spec);
LeadingFields leading_fields(const QuadraticIntegralSpec& spec);
LeadingCoefficients leading_from_constants(const QuadraticIntegralSpec& spec, const Vec3& x);
MomentumPolynomial to_polynomial(const QuadraticIntegralSpec& spec);
// Inverse of to_polynomial; throws if the quadratic part is not built from Euclidean generators.
QuadraticIntegralSpec spec_from_polynomial(const MomentumPolynomial& X);

struct NamedResidual {
    std::string name;
    double value = 0.0;
    double scale = 0.0;

    double normalized() const;
};

// Third-order conditions on (h, n): nine derivative identities plus div n = 0.
std::vector<NamedResidual> third_order_residuals(const LeadingFields& lead, const Vec3& x);

class DeterminingEquations {
public:
    DeterminingEquations(const MagneticSystem& sys, const QuadraticIntegralSpec& spec);

    // "2ord-1".."2ord-6", "1ord-1".."1ord-3", "0ord"
    std::vector<NamedResidual> residuals(const Vec3& x) const;
    // "comp-1".."comp-6" (mixed third derivatives of s) and "compm-12", "compm-13", "compm-23".
    std::vector<NamedResidual> compatibility(const Vec3& x) const;

private:
    struct Equation {
        std::string name;
        std::vector<Field> lhs;
        std::vector<Field> rhs;
    };
    NamedResidual eval(const Equation& e, const Vec3& x) const;

    const MagneticSystem* sys_;
    std::vector<Equation> determining_;
    std::vector<Equation> compat_;
};

std::vector<NamedResidual> determining_residuals(const MagneticSystem& sys, const QuadraticIntegralSpec& spec,
                                                 const Vec3& x);
std::vector<NamedResidual> compatibility_residuals(const MagneticSystem& sys, const QuadraticIntegralSpec& spec,
                                                   const Vec3& x);

double bracket_residual(const MagneticSystem& sys, const MomentumPolynomial& I, const std::vector<PhasePoint>& points);

struct DependenceFit {
    std::vector<double> coefficients;
    double residual = 0.0;
};

inline constexpr double kDependenceThreshold = 1e-8;

DependenceFit dependence_fit(const MomentumPolynomial& target, const std::vector<MomentumPolynomial>& basis,
                             const MagneticSystem& sys, const std::vector<PhasePoint>& points);

}  // namespace magsep
