#pragma once

#include <array>
#include <string>
#include <vector>

#include "magsep/polynomial.hpp"

namespace magsep {

// Polynomial in (kappa, p1, p2) with coefficients over (x1, x2); used for 2D systems and
// their integrals depending polynomially on the reduced momentum kappa.
class KappaPolynomial {
public:
    struct Term {
        int kappa_power = 0;
        std::array<int, 2> k{};
        Field coeff;
    };

    KappaPolynomial() = default;
    KappaPolynomial(const Field& scalar);

    static KappaPolynomial term(const Field& coeff, int kappa_power, std::array<int, 2> k);
    static KappaPolynomial kappa();
    static KappaPolynomial momentum(int j);
    static KappaPolynomial coordinate(int i);

    double evaluate(double kappa, const std::array<double, 4>& z) const;
    // Gradient with respect to (x1, x2, p1, p2).
    std::array<double, 4> gradient(double kappa, const std::array<double, 4>& z) const;
    int kappa_degree() const;
    const std::vector<Term>& terms() const { return terms_; }
    std::string to_string() const;

    KappaPolynomial operator-() const;
    KappaPolynomial& operator+=(const KappaPolynomial& o);
    friend KappaPolynomial operator+(KappaPolynomial a, const KappaPolynomial& b) { return a += b; }
    friend KappaPolynomial operator-(KappaPolynomial a, const KappaPolynomial& b) { return a += -b; }
    friend KappaPolynomial operator*(const KappaPolynomial& a, const KappaPolynomial& b);

private:
    void normalize();
    std::vector<Term> terms_;
};

struct Reduced2DSystem {
    KappaPolynomial hamiltonian;
    double kappa = 0.0;
    std::string source;

    double operator()(const std::array<double, 4>& z) const { return hamiltonian.evaluate(kappa, z); }
    std::string to_string() const;
};

class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// H0^kappa = H(x1, x2, ., p1, p2, kappa) - kappa^2 / 2 for a Case I system.
Reduced2DSystem reduce_caseI(const MagneticSystem& sys, double kappa, const std::string& source = "");

// kappa -> p3 in canonical momenta, rewritten in the covariant momenta of gauge.
MomentumPolynomial lift_integral(const KappaPolynomial& I2d, const GaugePotential& gauge);

double poisson_2d(const KappaPolynomial& f, const KappaPolynomial& g, double kappa, const std::array<double, 4>& z);

// old = M * new + offset on (x1, x2, x3, p1, p2, p3).
struct AffineMap {
    std::array<std::array<double, 6>, 6> M{};
    Vec6 offset{};

    static AffineMap identity();
    PhasePoint operator()(const PhasePoint& pt) const;
    AffineMap then(const AffineMap& outer) const;
};

double symplectic_residual(const std::array<std::array<double, 6>, 6>& J);
std::array<std::array<double, 6>, 6> finite_difference_jacobian(const AffineMap& map, const PhasePoint& at,
                                                               double step = 0x1p-6);

AffineMap prop32_affine(double gamma);
PhasePoint prop32_map(double gamma, const PhasePoint& pt_new);
// K = (P1^2 + P2^2)/2 + gamma^2 X^2 / 2 + V(Y) with V read off the system's effective potential.
double prop32_hamiltonian(const MagneticSystem& sys, double gamma, const PhasePoint& pt_new);

struct Sec8Info {
    double kappa3 = 0.0;
    bool degenerate = false;
    bool inverted = false;
    double lambda = 0.0;
};

inline constexpr double kDegenerateTolerance = 1e-12;

Sec8Info sec8_info(double a1, double a2, double v12, double v22);
AffineMap sec8_affine(double a1, double a2, double v12, double v22);
PhasePoint sec8_map(double a1, double a2, double v12, double v22, const PhasePoint& pt_new);
// Translation x1 -> x1 - v11/(2 v12), x2 -> x2 - v21/(2 v22) removing the linear potential terms.
// The translated Hamiltonian picks up p3_coefficient * P3 + energy_offset.
struct Sec8Translation {
    AffineMap map;
    double energy_offset = 0.0;
    double p3_coefficient = 0.0;
};
Sec8Translation sec8_translation(double a1, double a2, double v11, double v12, double v21, double v22);
// P3 = P3'/lambda, Z = lambda Z'.
AffineMap p3_scaling(double lambda);
double sec8_hamiltonian(double kappa3, double v12, double v22, const PhasePoint& pt_new);

}  // namespace magsep
