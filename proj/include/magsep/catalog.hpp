#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magsep/integrals.hpp"
#include "magsep/reduction.hpp"
#include "magsep/sampling.hpp"

namespace magsep::catalog {

using ParamMap = std::map<std::string, double>;

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Classification { integrable, minimal, maximal };
enum class Role { cartesian, additional, higher_order };

std::string to_string(Classification c);
std::string to_string(Role r);

struct ParamSpec {
    std::string name;
    double default_value = 1.0;
    // Enters only the effective potential; the shipped integrals constrain it.
    bool w_only = false;
};

struct CatalogEntry {
    std::string id;
    std::string anchor;
    std::string description;
    std::vector<ParamSpec> params;
    std::vector<std::string> predicates;
    Classification classification = Classification::integrable;
    int expected_rank = 3;
};

struct ShippedIntegral {
    std::string name;
    Role role = Role::cartesian;
    std::string reference;
    MomentumPolynomial poly;
    std::optional<QuadraticIntegralSpec> spec;
    // kappa-parametric planar integral this one was lifted from.
    std::optional<KappaPolynomial> planar;
};

struct Instance {
    std::string id;
    ParamMap params;
    MagneticSystem system;
    std::vector<ShippedIntegral> integrals;
    Classification classification = Classification::integrable;
    int expected_rank = 3;
    // Rank reached by H together with the shipped integrals.
    int explicit_rank = 3;
    SampleBox sample_box;
    SampleBox start_box;
    std::vector<std::pair<std::string, std::string>> metadata;

    // H followed by every shipped integral.
    std::vector<MomentumPolynomial> rank_set() const;
    const ShippedIntegral& integral(const std::string& name) const;
    std::string meta(const std::string& key) const;
};

// Shift of one parameter applied to the system only; integrals keep the unperturbed values.
struct Perturbation {
    std::string param;
    double delta = 0.0;
};

const std::vector<CatalogEntry>& list();
const CatalogEntry& find(const std::string& id);
// Defaults merged with overrides; throws ValidationError on unknown names or violated predicates.
ParamMap resolve(const std::string& id, const ParamMap& overrides = {});
Instance instantiate(const std::string& id, const ParamMap& overrides = {},
                     const std::optional<Perturbation>& perturbation = std::nullopt);

// "W" selects the first W-only parameter of the entry.
Perturbation parse_perturbation(const std::string& id, const std::string& text);

}  // namespace magsep::catalog
