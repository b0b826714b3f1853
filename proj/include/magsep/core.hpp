#pragma once

#include <array>
#include <optional>
#include <string>

#include "magsep/field.hpp"

namespace magsep {

using Vec6 = std::array<double, 6>;

// Smallest admissible distance to a singular hyperplane x_i = 0.
inline constexpr double kSingularGuard = 1e-3;

struct PhasePoint {
    Vec3 x{};
    Vec3 p{};

    Vec6 as_vector() const { return {x[0], x[1], x[2], p[0], p[1], p[2]}; }
    static PhasePoint from_vector(const Vec6& v) { return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}}; }
    bool finite() const;
};

struct GaugePotential {
    std::array<Field, 3> A;

    Vec3 operator()(const Vec3& x) const { return {A[0](x), A[1](x), A[2](x)}; }
    std::array<Field, 3> curl() const;
};

enum class Separation { none, case_one, case_two };

// Case I: A = (0, 0, u1(x2) - u2(x1)), V = V1(x1) + V2(x2).
struct CaseOneData {
    ScalarFunction1D u1, u2, V1, V2;
};

// Case II: A = (0, u3(x1), -u2(x1)), V = V1(x1).
struct CaseTwoData {
    ScalarFunction1D u2, u3, V1;
};

class MagneticSystem {
public:
    MagneticSystem() : MagneticSystem(GaugePotential{}, Field{}) {}
    MagneticSystem(GaugePotential gauge, Field scalar_potential);

    static MagneticSystem case_one(const CaseOneData& d);
    static MagneticSystem case_two(const CaseTwoData& d);

    const GaugePotential& gauge() const { return gauge_; }
    const Field& scalar_potential() const { return V_; }
    const std::array<Field, 3>& magnetic_field() const { return B_; }
    const Field& effective_potential() const { return W_; }

    Vec3 B(const Vec3& x) const;
    double W(const Vec3& x) const { return W_(x); }
    double V(const Vec3& x) const { return V_(x); }
    Vec3 grad_W(const Vec3& x) const;

    // d_i A_j
    const Field& dA(int i, int j) const { return dA_[i][j]; }
    const Field& dW(int i) const { return dW_[i]; }

    Separation separation() const { return separation_; }
    const std::optional<CaseOneData>& case_one_data() const { return case_one_; }
    const std::optional<CaseTwoData>& case_two_data() const { return case_two_; }

    const std::array<bool, 3>& singular_axes() const { return singular_; }
    const std::array<bool, 3>& positive_axes() const { return positive_; }
    bool admissible(const Vec3& x) const;
    void check_admissible(const Vec3& x) const;

private:
    GaugePotential gauge_;
    Field V_;
    Field W_;
    std::array<Field, 3> B_;
    std::array<std::array<Field, 3>, 3> dA_;
    std::array<Field, 3> dW_;
    Separation separation_ = Separation::none;
    std::optional<CaseOneData> case_one_;
    std::optional<CaseTwoData> case_two_;
    std::array<bool, 3> singular_{false, false, false};
    std::array<bool, 3> positive_{false, false, false};
};

Vec3 covariant_momentum(const PhasePoint& pt, const GaugePotential& gauge);
Vec3 covariant_momentum(const PhasePoint& pt, const MagneticSystem& sys);
Vec3 curl(const GaugePotential& gauge, const Vec3& x);

double hamiltonian(const MagneticSystem& sys, const PhasePoint& pt);
double hamiltonian_gauge_form(const MagneticSystem& sys, const PhasePoint& pt);
Vec6 hamiltonian_gradient(const MagneticSystem& sys, const PhasePoint& pt);

// A' = A + grad chi, V' = W + |A'|^2 / 2.
MagneticSystem gauge_transform(const MagneticSystem& sys, const Field& chi);
// Canonical momenta paired with gauge_transform: p' = p - grad chi.
PhasePoint shift_momenta(const PhasePoint& pt, const Field& chi);

}  // namespace magsep
