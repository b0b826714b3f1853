#include "magsep/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magsep {

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string atom_string(const Atom& a, const std::string& var) {
    std::string out;
    auto append = [&](const std::string& s) {
        if (!out.empty()) out += "*";
        out += s;
    };
    if (a.power == 1.0) {
        append(var);
    } else if (a.power != 0.0) {
        append(var + "^" + format_number(a.power));
    }
    if (a.rate != 0.0) append("exp(" + format_number(a.rate) + "*" + var + ")");
    if (a.log_power == 1) {
        append("ln|" + var + "|");
    } else if (a.log_power > 1) {
        append("ln|" + var + "|^" + std::to_string(a.log_power));
    }
    return out;
}

// d/dx of x^b e^{cx} L^n = b x^{b-1} e^{cx} L^n + c x^b e^{cx} L^n + n x^{b-1} e^{cx} L^{n-1}
std::vector<AtomTerm> atom_derivative(const Atom& a) {
    std::vector<AtomTerm> out;
    if (a.power != 0.0) out.push_back({a.power, Atom{a.power - 1.0, a.rate, a.log_power}});
    if (a.rate != 0.0) out.push_back({a.rate, a});
    if (a.log_power > 0) out.push_back({double(a.log_power), Atom{a.power - 1.0, a.rate, a.log_power - 1}});
    return out;
}

}  // namespace

const char* axis_name(int axis) {
    static const char* names[] = {"x1", "x2", "x3"};
    return names[axis];
}

bool Atom::integer_power() const { return power == std::floor(power); }

bool Atom::singular_at_zero() const { return power < 0.0 || !integer_power() || log_power > 0; }

double Atom::eval(double x, const char* var) const {
    double v = 1.0;
    if (power != 0.0) {
        if (integer_power()) {
            if (power < 0.0 && x == 0.0) {
                throw DomainError(std::string(var) + " = 0 lies on the singular set");
            }
        } else if (!(x > 0.0)) {
            throw DomainError(std::string(var) + " = " + format_number(x) +
                              " is outside the positive domain of a real power");
        }
        v = std::pow(x, power);
    }
    if (rate != 0.0) v *= std::exp(rate * x);
    if (log_power > 0) {
        if (x == 0.0) throw DomainError(std::string(var) + " = 0 lies on the singular set");
        const double l = std::log(std::fabs(x));
        for (int i = 0; i < log_power; ++i) v *= l;
    }
    return v;
}

Atom Atom::operator*(const Atom& o) const {
    return Atom{power + o.power, rate + o.rate, log_power + o.log_power};
}

ScalarFunction1D::ScalarFunction1D(double c) {
    if (c != 0.0) terms_.push_back({c, Atom{}});
}

ScalarFunction1D ScalarFunction1D::monomial(double c, double power) {
    return from_atom(c, Atom{power, 0.0, 0});
}

ScalarFunction1D ScalarFunction1D::exponential(double a, double rate) {
    return from_atom(a, Atom{0.0, rate, 0});
}

ScalarFunction1D ScalarFunction1D::log_abs(double a, int n) {
    if (n < 0) throw std::invalid_argument("log power must be non-negative");
    return from_atom(a, Atom{0.0, 0.0, n});
}

ScalarFunction1D ScalarFunction1D::from_atom(double c, const Atom& atom) {
    ScalarFunction1D f;
    if (c != 0.0) f.terms_.push_back({c, atom});
    return f;
}

double ScalarFunction1D::operator()(double x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coeff * t.atom.eval(x);
    return s;
}

ScalarFunction1D ScalarFunction1D::derivative(int order) const {
    ScalarFunction1D cur = *this;
    for (int k = 0; k < order; ++k) {
        ScalarFunction1D next;
        for (const auto& t : cur.terms_) {
            for (const auto& d : atom_derivative(t.atom)) next.terms_.push_back({t.coeff * d.coeff, d.atom});
        }
        next.normalize();
        cur = std::move(next);
    }
    return cur;
}

bool ScalarFunction1D::singular_at_zero() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const AtomTerm& t) { return t.atom.singular_at_zero(); });
}

bool ScalarFunction1D::needs_positive() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const AtomTerm& t) { return t.atom.needs_positive(); });
}

std::string ScalarFunction1D::to_string(const std::string& var) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        const std::string a = atom_string(t.atom, var);
        std::string piece = a.empty() ? format_number(t.coeff) : format_number(t.coeff) + "*" + a;
        if (!out.empty()) out += " + ";
        out += piece;
    }
    return out;
}

void ScalarFunction1D::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const AtomTerm& a, const AtomTerm& b) { return a.atom < b.atom; });
    std::vector<AtomTerm> merged;
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().atom == t.atom) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const AtomTerm& t) { return t.coeff == 0.0; });
    terms_ = std::move(merged);
}

ScalarFunction1D ScalarFunction1D::operator-() const {
    ScalarFunction1D r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

ScalarFunction1D operator+(const ScalarFunction1D& a, const ScalarFunction1D& b) {
    ScalarFunction1D r = a;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    r.normalize();
    return r;
}

ScalarFunction1D operator-(const ScalarFunction1D& a, const ScalarFunction1D& b) { return a + (-b); }

ScalarFunction1D operator*(const ScalarFunction1D& a, const ScalarFunction1D& b) {
    ScalarFunction1D r;
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) r.terms_.push_back({s.coeff * t.coeff, s.atom * t.atom});
    }
    r.normalize();
    return r;
}

Field::Field(double c) {
    if (c != 0.0) terms_.push_back({c, {}});
}

Field Field::coordinate(int axis) {
    Field f;
    Term t{1.0, {}};
    t.atoms[axis].power = 1.0;
    f.terms_.push_back(t);
    return f;
}

Field Field::on_axis(const ScalarFunction1D& fn, int axis) {
    Field f;
    for (const auto& at : fn.terms()) {
        Term t{at.coeff, {}};
        t.atoms[axis] = at.atom;
        f.terms_.push_back(t);
    }
    f.normalize();
    return f;
}

Field Field::monomial(double c, const std::array<int, 3>& powers) {
    Field f;
    if (c == 0.0) return f;
    Term t{c, {}};
    for (int i = 0; i < 3; ++i) t.atoms[i].power = powers[i];
    f.terms_.push_back(t);
    return f;
}

double Field::operator()(const Vec3& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (int i = 0; i < 3; ++i) {
            if (!t.atoms[i].is_one()) v *= t.atoms[i].eval(x[i], axis_name(i));
        }
        s += v;
    }
    return s;
}

Field Field::d(int axis) const {
    Field r;
    for (const auto& t : terms_) {
        for (const auto& dt : atom_derivative(t.atoms[axis])) {
            Term n = t;
            n.coeff *= dt.coeff;
            n.atoms[axis] = dt.atom;
            r.terms_.push_back(n);
        }
    }
    r.normalize();
    return r;
}

bool Field::is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
        return t.atoms[0].is_one() && t.atoms[1].is_one() && t.atoms[2].is_one();
    });
}

std::array<bool, 3> Field::singular_axes() const {
    std::array<bool, 3> s{false, false, false};
    for (const auto& t : terms_) {
        for (int i = 0; i < 3; ++i) s[i] = s[i] || t.atoms[i].singular_at_zero();
    }
    return s;
}

std::array<bool, 3> Field::positive_axes() const {
    std::array<bool, 3> s{false, false, false};
    for (const auto& t : terms_) {
        for (int i = 0; i < 3; ++i) s[i] = s[i] || t.atoms[i].needs_positive();
    }
    return s;
}

bool Field::depends_on(int axis) const {
    return std::any_of(terms_.begin(), terms_.end(), [axis](const Term& t) { return !t.atoms[axis].is_one(); });
}

std::string Field::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        std::string piece = format_number(t.coeff);
        for (int i = 0; i < 3; ++i) {
            const std::string a = atom_string(t.atoms[i], axis_name(i));
            if (!a.empty()) piece += "*" + a;
        }
        if (!out.empty()) out += " + ";
        out += piece;
    }
    return out;
}

void Field::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.atoms < b.atoms; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().atoms == t.atoms) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
    terms_ = std::move(merged);
}

Field Field::operator-() const {
    Field r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

Field& Field::operator+=(const Field& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
}

Field& Field::operator-=(const Field& o) { return *this += -o; }

Field& Field::operator*=(const Field& o) {
    *this = *this * o;
    return *this;
}

Field operator*(const Field& a, const Field& b) {
    Field r;
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            Field::Term n{s.coeff * t.coeff, {}};
            for (int i = 0; i < 3; ++i) n.atoms[i] = s.atoms[i] * t.atoms[i];
            r.terms_.push_back(n);
        }
    }
    r.normalize();
    return r;
}

std::array<Field, 3> gradient(const Field& f) { return {f.d(0), f.d(1), f.d(2)}; }

}  // namespace magsep
