#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "magsep/catalog.hpp"
#include "magsep/dynamics.hpp"

namespace magsep::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

inline constexpr const char* kSeedEnv = "MAGSEP_SEED";

// Flat key-value file with [system], [params] and [run] sections.
struct RunConfig {
    std::string entry;
    catalog::ParamMap params;
    std::optional<std::uint64_t> seed;
    int points = 100;
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double t_end = 100.0;
    std::string output;
    int starts = 5;
    int samples = 101;
    int jobs = 1;
    std::string perturb;

    std::string to_text() const;
    static RunConfig from_text(const std::string& text);
    static RunConfig load(const std::string& path);

    bool operator==(const RunConfig&) const = default;
};

std::string list_text();
std::string list_json();

// Header t,x1,x2,x3,p1,p2,p3,H followed by one column per integral; %.17g values.
std::string trajectory_csv(const Trajectory& traj, const MagneticSystem& sys,
                           const std::vector<catalog::ShippedIntegral>& integrals);

// Write to a sibling temporary file and rename over path.
void write_atomic(const std::string& path, const std::string& content);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magsep::cli
