#pragma once

#include <array>
#include <string>
#include <vector>

#include "magsep/core.hpp"

namespace magsep {

using MultiIndex = std::array<int, 3>;

inline constexpr int kMaxMomentumDegree = 4;

// Polynomial in the covariant momenta p^A with coordinate-dependent coefficients.
class MomentumPolynomial {
public:
    struct Term {
        MultiIndex k{};
        Field coeff;
        std::array<Field, 3> dcoeff;
    };

    MomentumPolynomial() = default;
    MomentumPolynomial(const Field& scalar);
    MomentumPolynomial(double c) : MomentumPolynomial(Field(c)) {}

    static MomentumPolynomial monomial(const Field& coeff, const MultiIndex& k);
    static MomentumPolynomial momentum(int j);
    static MomentumPolynomial coordinate(int i);
    // p_j = p_j^A - A_j in the given gauge.
    static MomentumPolynomial canonical_momentum(int j, const GaugePotential& gauge);
    // l_j^A = sum eps_jkl x_k p_l^A
    static MomentumPolynomial angular(int j);
    static MomentumPolynomial hamiltonian(const MagneticSystem& sys);
    // Terms given in canonical momenta, rewritten through p = p^A - A.
    static MomentumPolynomial from_canonical(const std::vector<std::pair<MultiIndex, Field>>& terms,
                                             const GaugePotential& gauge);

    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }
    Field coefficient(const MultiIndex& k) const;
    MomentumPolynomial homogeneous_part(int degree) const;
    std::string to_string() const;

    double evaluate_covariant(const Vec3& x, const Vec3& q) const;
    double evaluate(const MagneticSystem& sys, const PhasePoint& pt) const;
    // (d/dx, d/dp) in canonical variables.
    Vec6 gradient(const MagneticSystem& sys, const PhasePoint& pt) const;

    MomentumPolynomial operator-() const;
    MomentumPolynomial& operator+=(const MomentumPolynomial& o);
    MomentumPolynomial& operator-=(const MomentumPolynomial& o);
    friend MomentumPolynomial operator+(MomentumPolynomial a, const MomentumPolynomial& b) { return a += b; }
    friend MomentumPolynomial operator-(MomentumPolynomial a, const MomentumPolynomial& b) { return a -= b; }
    friend MomentumPolynomial operator*(const MomentumPolynomial& a, const MomentumPolynomial& b);

private:
    void normalize();
    std::vector<Term> terms_;
};

double evaluate(const MomentumPolynomial& I, const MagneticSystem& sys, const PhasePoint& pt);

double poisson_from_gradients(const Vec6& f, const Vec6& g);
double poisson(const MomentumPolynomial& f, const MomentumPolynomial& g, const MagneticSystem& sys,
               const PhasePoint& pt);

}  // namespace magsep
