#pragma once

#include <array>
#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace magsep {

using Vec3 = std::array<double, 3>;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// x^power * exp(rate * x) * ln|x|^log_power
struct Atom {
    double power = 0.0;
    double rate = 0.0;
    int log_power = 0;

    auto operator<=>(const Atom&) const = default;

    bool is_one() const { return power == 0.0 && rate == 0.0 && log_power == 0; }
    bool integer_power() const;
    bool singular_at_zero() const;
    bool needs_positive() const { return !integer_power(); }

    double eval(double x, const char* var = "x") const;
    Atom operator*(const Atom& o) const;
};

struct AtomTerm {
    double coeff = 0.0;
    Atom atom;
};

class ScalarFunction1D {
public:
    ScalarFunction1D() = default;
    ScalarFunction1D(double c);

    static ScalarFunction1D monomial(double c, double power);
    static ScalarFunction1D exponential(double a, double rate);
    static ScalarFunction1D log_abs(double a, int n = 1);
    static ScalarFunction1D from_atom(double c, const Atom& atom);

    double operator()(double x) const;
    ScalarFunction1D derivative(int order = 1) const;

    bool is_zero() const { return terms_.empty(); }
    bool singular_at_zero() const;
    bool needs_positive() const;
    const std::vector<AtomTerm>& terms() const { return terms_; }
    std::string to_string(const std::string& var = "x") const;

    ScalarFunction1D operator-() const;
    friend ScalarFunction1D operator+(const ScalarFunction1D& a, const ScalarFunction1D& b);
    friend ScalarFunction1D operator-(const ScalarFunction1D& a, const ScalarFunction1D& b);
    friend ScalarFunction1D operator*(const ScalarFunction1D& a, const ScalarFunction1D& b);

private:
    void normalize();
    std::vector<AtomTerm> terms_;
};

// A coordinate field on R^3: a finite sum of coeff * a(x1) * b(x2) * c(x3).
class Field {
public:
    struct Term {
        double coeff = 0.0;
        std::array<Atom, 3> atoms;
    };

    Field() = default;
    Field(double c);

    static Field coordinate(int axis);
    static Field on_axis(const ScalarFunction1D& f, int axis);
    static Field monomial(double c, const std::array<int, 3>& powers);

    double operator()(const Vec3& x) const;
    Field d(int axis) const;

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    std::array<bool, 3> singular_axes() const;
    std::array<bool, 3> positive_axes() const;
    bool depends_on(int axis) const;
    const std::vector<Term>& terms() const { return terms_; }
    std::string to_string() const;

    Field operator-() const;
    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(const Field& o);
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(const Field& a, const Field& b);

private:
    void normalize();
    std::vector<Term> terms_;
};

std::array<Field, 3> gradient(const Field& f);

const char* axis_name(int axis);

}  // namespace magsep
