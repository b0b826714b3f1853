#include "magsep/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace magsep::cli {

namespace {

using catalog::Instance;
using catalog::ValidationError;

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Shortest text that reads back to the same double.
std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string e3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(what + ": '" + text + "' is not a number");
}

int parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used == text.size() && v >= 0 && v <= 100'000'000) return int(v);
    } catch (const std::exception&) {
    }
    throw ValidationError(what + ": '" + text + "' is not a non-negative integer");
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        if (!text.empty() && text[0] != '-') {
            const unsigned long long v = std::stoull(text, &used, 0);
            if (used == text.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw ValidationError(what + ": '" + text + "' is not a 64-bit unsigned integer");
}

std::pair<std::string, double> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("parameter must read name=value, got '" + text + "'");
    const std::string name = trim(text.substr(0, eq));
    return {name, parse_double(trim(text.substr(eq + 1)), "parameter " + name)};
}

PhasePoint parse_start(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_double(trim(item), "--start"));
    if (v.size() != 6) throw ValidationError("--start needs six comma-separated values x1,x2,x3,p1,p2,p3");
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

struct Seed {
    std::uint64_t value = kDefaultSeed;
    std::string source = "default";
};

Seed resolve_seed(const RunConfig& cfg) {
    if (cfg.seed) return {*cfg.seed, "configured"};
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        return {parse_seed(env, kSeedEnv), std::string("environment ") + kSeedEnv + "=" + env};
    }
    return {};
}

// Starts use a stream distinct from the residual sample.
std::uint64_t start_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

template <class F>
void parallel_for(int n, int jobs, F&& f) {
    std::vector<std::exception_ptr> errors(std::size_t(std::max(n, 0)));
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(jobs, n); ++w) {
        pool.emplace_back([&] {
            for (int i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    errors[std::size_t(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Check {
    std::string name;
    std::string measured;
    std::string bound;
    bool pass = true;
};

struct Report {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    void add(std::string name, double measured, double bound) {
        checks.push_back({std::move(name), e3(measured), "<= " + e3(bound), measured <= bound});
    }
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
    std::string render() const {
        std::ostringstream os;
        for (const auto& [k, v] : header) os << k << ": " << v << "\n";
        for (const auto& c : checks) {
            os << "check " << std::left << std::setw(28) << c.name << " " << std::setw(12) << c.measured << " "
               << std::setw(14) << c.bound << " " << (c.pass ? "PASS" : "FAIL") << "\n";
        }
        for (const auto& n : notes) os << "note: " << n << "\n";
        os << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
        return os.str();
    }
};

std::string params_text(const catalog::ParamMap& p) {
    std::string s;
    for (const auto& [k, v] : p) s += (s.empty() ? "" : " ") + k + "=" + shortest(v);
    return s;
}

Instance instantiate(const RunConfig& cfg) {
    if (cfg.entry.empty()) throw ValidationError("no catalog entry given");
    std::optional<catalog::Perturbation> pert;
    if (!cfg.perturb.empty()) pert = catalog::parse_perturbation(cfg.entry, cfg.perturb);
    return catalog::instantiate(cfg.entry, cfg.params, pert);
}

void common_header(Report& r, const Instance& inst, const RunConfig& cfg, const Seed& seed) {
    const auto& e = catalog::find(inst.id);
    r.header.push_back({"entry", inst.id});
    r.header.push_back({"anchor", e.anchor});
    r.header.push_back({"classification", catalog::to_string(inst.classification)});
    r.header.push_back({"params", params_text(inst.params)});
    if (!cfg.perturb.empty()) r.header.push_back({"perturbation", inst.meta("perturbation") + " (system only)"});
    r.header.push_back({"seed", std::to_string(seed.value) + " (" + seed.source + ")"});
}

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
    out << text;
    if (!cfg.output.empty()) write_atomic(cfg.output, text);
}

int cmd_verify(const RunConfig& cfg, const std::optional<PhasePoint>& start, std::ostream& out) {
    const Seed seed = resolve_seed(cfg);
    const Instance inst = instantiate(cfg);
    const auto& sys = inst.system;
    Report r;
    common_header(r, inst, cfg, seed);
    r.header.push_back({"points", std::to_string(cfg.points)});
    r.header.push_back({"flow", "relTol=" + shortest(cfg.rel_tol) + " absTol=" + shortest(cfg.abs_tol) + " tEnd=" + shortest(cfg.t_end)});

    const auto pts = sample_points(sys, inst.sample_box, cfg.points, seed.value);
    for (const auto& I : inst.integrals) r.add("bracket[" + I.name + "]", bracket_residual(sys, I.poly, pts), 1e-10);
    for (const auto& I : inst.integrals) {
        if (!I.spec) continue;
        const DeterminingEquations de(sys, *I.spec);
        double det = 0.0, comp = 0.0;
        for (const auto& pt : pts) {
            for (const auto& x : de.residuals(pt.x)) det = std::max(det, x.normalized());
            for (const auto& x : de.compatibility(pt.x)) comp = std::max(comp, x.normalized());
        }
        r.add("determining[" + I.name + "]", det, 1e-10);
        r.add("compatibility[" + I.name + "]", comp, 1e-10);
    }

    std::vector<PhasePoint> starts;
    if (start) {
        starts.push_back(*start);
    } else {
        starts = sample_points(sys, inst.start_box, cfg.starts, start_seed(seed.value));
    }
    const auto set = inst.rank_set();
    std::vector<std::vector<double>> drifts(starts.size());
    parallel_for(int(starts.size()), cfg.jobs, [&](int k) {
        FlowOptions o;
        o.t_end = cfg.t_end;
        o.rel_tol = cfg.rel_tol;
        o.abs_tol = cfg.abs_tol;
        const Trajectory tr = flow(sys, starts[std::size_t(k)], o);
        if (tr.truncated) throw DomainError(tr.diagnostic);
        for (const auto& I : set) drifts[std::size_t(k)].push_back(drift(tr, I, sys));
    });
    r.header.push_back({"starts", std::to_string(starts.size())});
    for (std::size_t j = 0; j < set.size(); ++j) {
        double worst = 0.0;
        for (const auto& d : drifts) worst = std::max(worst, d[j]);
        r.add("drift[" + (j == 0 ? std::string("H") : inst.integrals[j - 1].name) + "]", worst, 1e-8);
    }

    const std::vector<PhasePoint> rank_pts(pts.begin(), pts.begin() + std::min<std::ptrdiff_t>(20, std::ptrdiff_t(pts.size())));
    const int rank = independence_rank(set, sys, rank_pts);
    r.checks.push_back({"rank", "rank=" + std::to_string(rank), "== " + std::to_string(inst.explicit_rank),
                        rank == inst.explicit_rank});
    r.header.push_back({"expected rank", std::to_string(inst.expected_rank)});
    if (inst.explicit_rank < inst.expected_rank) {
        r.notes.push_back("shipped integrals reach rank " + std::to_string(inst.explicit_rank) + " of the expected " +
                          std::to_string(inst.expected_rank));
    }

    if (const std::string period = inst.meta("closure_period"); !period.empty()) {
        const double window = 20.0 * std::stod(inst.meta("shortest_period"));
        FlowOptions o;
        o.t_end = window;
        o.rel_tol = cfg.rel_tol;
        o.abs_tol = cfg.abs_tol;
        o.sample_times = {window};
        o.keep_dense = true;
        const Trajectory tr = flow(sys, starts.front(), o);
        if (tr.truncated) throw DomainError(tr.diagnostic);
        const Recurrence rec = recurrence(tr, starts.front(), 1.0);
        r.add("closure", rec.min_distance, 1e-5);
        r.notes.push_back("closure is numerical evidence for the extra integral; nearest return at t=" + g17(rec.t_at_min) +
                          ", expected period " + period);
    }
    for (const auto& [k, v] : inst.metadata) {
        if (k == "note" || k == "evidence" || k == "classification_note") r.notes.push_back(v);
    }
    emit(r.render(), cfg, out);
    return r.passed() ? kExitPass : kExitFailure;
}

std::vector<double> sample_times(double t_end, int n) {
    if (n < 1) throw ValidationError("--samples must be at least 1");
    if (n == 1) return {t_end};
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) t[std::size_t(k)] = k == n - 1 ? t_end : t_end * double(k) / double(n - 1);
    return t;
}

int cmd_integrate(const RunConfig& cfg, const std::optional<PhasePoint>& start, std::ostream& out, std::ostream& err) {
    const Seed seed = resolve_seed(cfg);
    const Instance inst = instantiate(cfg);
    const PhasePoint pt0 = start ? *start : sample_points(inst.system, inst.start_box, 1, start_seed(seed.value)).front();
    FlowOptions o;
    o.t_end = cfg.t_end;
    o.rel_tol = cfg.rel_tol;
    o.abs_tol = cfg.abs_tol;
    o.sample_times = sample_times(cfg.t_end, cfg.samples);
    const Trajectory tr = flow(inst.system, pt0, o);
    const std::string csv = trajectory_csv(tr, inst.system, inst.integrals);
    if (cfg.output.empty()) {
        out << csv;
        err << "seed " << seed.value << " (" << seed.source << ")\n";
    } else {
        write_atomic(cfg.output, csv);
        out << "wrote " << tr.size() << " rows to " << cfg.output << " (seed " << seed.value << ", " << seed.source
            << ")\n";
    }
    if (tr.truncated) {
        err << "trajectory truncated: " << tr.diagnostic << "\n";
        return kExitDomain;
    }
    return kExitPass;
}

std::array<double, 4> planar(const PhasePoint& pt) { return {pt.x[0], pt.x[1], pt.p[0], pt.p[1]}; }

double planar_bracket(const KappaPolynomial& f, const KappaPolynomial& g, double kappa, const std::array<double, 4>& z) {
    const auto a = f.gradient(kappa, z);
    const auto b = g.gradient(kappa, z);
    double na = 0.0, nb = 0.0;
    for (int k = 0; k < 4; ++k) {
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return std::fabs(poisson_2d(f, g, kappa, z)) / (1.0 + std::sqrt(na * nb));
}

int cmd_reduce(const RunConfig& cfg, const std::string& kind, std::optional<double> kappa_opt,
               std::optional<double> gamma_opt, std::ostream& out) {
    const Seed seed = resolve_seed(cfg);
    const Instance inst = instantiate(cfg);
    const auto& sys = inst.system;
    Report r;
    common_header(r, inst, cfg, seed);
    r.header.push_back({"reduction", kind});
    const auto pts = sample_points(sys, inst.sample_box, cfg.points, seed.value);
    const std::vector<PhasePoint> few(pts.begin(), pts.begin() + std::min<std::ptrdiff_t>(20, std::ptrdiff_t(pts.size())));

    if (kind == "caseI-kappa") {
        const double kappa = kappa_opt.value_or(0.0);
        const Reduced2DSystem red = reduce_caseI(sys, kappa, inst.id);
        r.header.push_back({"kappa", shortest(kappa)});
        r.header.push_back({"H0", red.hamiltonian.to_string()});
        double identity = 0.0;
        for (const auto& pt : pts) {
            PhasePoint q = pt;
            q.p[2] = kappa;
            const double h0 = red(planar(pt));
            identity = std::max(identity, std::fabs(h0 - (hamiltonian(sys, q) - 0.5 * kappa * kappa)) / (1.0 + std::fabs(h0)));
        }
        r.add("identity", identity, 1e-12);
        r.checks.push_back({"canonicality", "n/a", "", true});
        for (const auto& I : inst.integrals) {
            if (!I.planar) continue;
            double worst2d = 0.0;
            for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
                const Reduced2DSystem hk = reduce_caseI(sys, k, inst.id);
                for (const auto& pt : pts) worst2d = std::max(worst2d, planar_bracket(hk.hamiltonian, *I.planar, k, planar(pt)));
            }
            const double worst3d = bracket_residual(sys, lift_integral(*I.planar, sys.gauge()), pts);
            r.add("planar bracket[" + I.name + "]", worst2d, 1e-10);
            r.add("lifted bracket[" + I.name + "]", worst3d, 1e-10);
            r.header.push_back({"planar " + I.name, I.planar->to_string()});
        }
    } else if (kind == "prop32") {
        const auto& A = sys.gauge().A;
        if (!A[0].is_zero() || !A[1].is_zero() || A[2].depends_on(1) || A[2].depends_on(2) || inst.meta("gamma").empty()) {
            throw StructureError(inst.id + " is not a constant-field system with A = (0, 0, -gamma x1)");
        }
        const double gamma = gamma_opt.value_or(std::stod(inst.meta("gamma")));
        r.header.push_back({"gamma", shortest(gamma)});
        const AffineMap map = prop32_affine(gamma);
        double identity = 0.0;
        for (const auto& pt : pts) {
            const PhasePoint old = map(pt);
            identity = std::max(identity, std::fabs(hamiltonian(sys, old) - prop32_hamiltonian(sys, gamma, pt)));
        }
        double canon = 0.0;
        for (const auto& pt : few) canon = std::max(canon, symplectic_residual(finite_difference_jacobian(map, pt)));
        r.add("identity", identity, 1e-12);
        r.add("canonicality", canon, 1e-12);
    } else if (kind == "sec8") {
        if (inst.id != "sec8.quadratic") throw StructureError(inst.id + " is not the constant-field quadratic-potential family");
        const auto& p = inst.params;
        const double a1 = p.at("a1"), a2 = p.at("a2"), v11 = p.at("v11"), v12 = p.at("v12"), v21 = p.at("v21"),
                     v22 = p.at("v22");
        const Sec8Info info = sec8_info(a1, a2, v12, v22);
        const Sec8Translation shift = sec8_translation(a1, a2, v11, v12, v21, v22);
        AffineMap map = sec8_affine(a1, a2, v12, v22).then(shift.map);
        double k3 = 0.0, p3c = shift.p3_coefficient;
        if (!info.degenerate) {
            map = p3_scaling(info.lambda).then(map);
            k3 = info.kappa3 > 0.0 ? 1.0 : -1.0;
            p3c /= info.lambda;
        }
        r.header.push_back({"kappa3", shortest(info.kappa3)});
        r.header.push_back({"degenerate", info.degenerate ? "true" : "false"});
        r.header.push_back({"inverted", info.inverted ? "true" : "false"});
        r.header.push_back({"lambda", shortest(info.lambda)});
        double identity = 0.0;
        for (const auto& pt : pts) {
            const double K = sec8_hamiltonian(k3, v12, v22, pt) + p3c * pt.p[2] + shift.energy_offset;
            identity = std::max(identity, std::fabs(hamiltonian(sys, map(pt)) - K) / (1.0 + std::fabs(K)));
        }
        double canon = 0.0;
        for (const auto& pt : few) canon = std::max(canon, symplectic_residual(finite_difference_jacobian(map, pt)));
        r.add("identity", identity, 1e-12);
        r.add("canonicality", canon, 1e-12);
        if (info.degenerate) r.notes.push_back("P3 drops out of the transformed Hamiltonian; Z is cyclic");
    } else {
        throw ValidationError("unknown reduction kind '" + kind + "' (caseI-kappa, prop32, sec8)");
    }
    emit(r.render(), cfg, out);
    return r.passed() ? kExitPass : kExitFailure;
}

void set_or_throw(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed") {
        cfg.seed = parse_seed(value, "seed");
    } else if (key == "points") {
        cfg.points = parse_int(value, "points");
    } else if (key == "rel_tol") {
        cfg.rel_tol = parse_double(value, "rel_tol");
    } else if (key == "abs_tol") {
        cfg.abs_tol = parse_double(value, "abs_tol");
    } else if (key == "t_end") {
        cfg.t_end = parse_double(value, "t_end");
    } else if (key == "output") {
        cfg.output = value;
    } else if (key == "starts") {
        cfg.starts = parse_int(value, "starts");
    } else if (key == "samples") {
        cfg.samples = parse_int(value, "samples");
    } else if (key == "jobs") {
        cfg.jobs = parse_int(value, "jobs");
    } else if (key == "perturb") {
        cfg.perturb = value;
    } else {
        throw ValidationError("unknown [run] key '" + key + "'");
    }
}

}  // namespace

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "[system]\nentry = " << entry << "\n\n[params]\n";
    for (const auto& [k, v] : params) os << k << " = " << g17(v) << "\n";
    os << "\n[run]\n";
    if (seed) os << "seed = " << *seed << "\n";
    os << "points = " << points << "\n";
    os << "rel_tol = " << g17(rel_tol) << "\n";
    os << "abs_tol = " << g17(abs_tol) << "\n";
    os << "t_end = " << g17(t_end) << "\n";
    if (!output.empty()) os << "output = " << output << "\n";
    os << "starts = " << starts << "\n";
    os << "samples = " << samples << "\n";
    os << "jobs = " << jobs << "\n";
    if (!perturb.empty()) os << "perturb = " << perturb << "\n";
    return os.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config line " + std::to_string(line_no) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "system" && section != "params" && section != "run") {
                throw ValidationError("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section == "system") {
            if (key != "entry") throw ValidationError("unknown [system] key '" + key + "'");
            cfg.entry = value;
        } else if (section == "params") {
            cfg.params[key] = parse_double(value, "parameter " + key);
        } else if (section == "run") {
            set_or_throw(cfg, key, value);
        } else {
            throw ValidationError("config line " + std::to_string(line_no) + ": key outside a section");
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string list_text() {
    std::ostringstream os;
    os << std::left << std::setw(20) << "id" << std::setw(12) << "class" << std::setw(6) << "rank" << std::setw(38)
       << "anchor"
       << "params (* enters W only)\n";
    for (const auto& e : catalog::list()) {
        std::string params;
        for (const auto& p : e.params) params += (params.empty() ? "" : " ") + p.name + (p.w_only ? "*" : "");
        os << std::setw(20) << e.id << std::setw(12) << catalog::to_string(e.classification) << std::setw(6)
           << e.expected_rank << std::setw(38) << e.anchor << params << "\n";
    }
    return os.str();
}

std::string list_json() {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : catalog::list()) {
        nlohmann::ordered_json params = nlohmann::ordered_json::array();
        for (const auto& p : e.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"w_only", p.w_only}});
        arr.push_back({{"id", e.id},
                       {"anchor", e.anchor},
                       {"description", e.description},
                       {"classification", catalog::to_string(e.classification)},
                       {"expected_rank", e.expected_rank},
                       {"params", params},
                       {"predicates", e.predicates}});
    }
    return arr.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& traj, const MagneticSystem& sys,
                           const std::vector<catalog::ShippedIntegral>& integrals) {
    std::string s = "t,x1,x2,x3,p1,p2,p3,H";
    for (const auto& I : integrals) s += "," + I.name;
    s += "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& pt = traj.points[k];
        s += g17(traj.t[k]);
        for (double v : pt.as_vector()) s += "," + g17(v);
        s += "," + g17(hamiltonian(sys, pt));
        for (const auto& I : integrals) s += "," + g17(I.poly.evaluate(sys, pt));
        s += "\n";
    }
    return s;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Superintegrable magnetic systems: catalog, verification, flows and reductions", "magsep"};
    app.require_subcommand(1);

    std::string format = "text";
    auto* list = app.add_subcommand("list", "List catalog entries");
    list->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    struct Common {
        std::string entry;
        std::vector<std::string> params;
        std::optional<std::string> seed, points, rel_tol, abs_tol, t_end, output, jobs, perturb, starts, samples;
        std::string config, start;
    };
    Common c;
    std::string kind;
    std::optional<double> kappa, gamma;

    auto common = [&c](CLI::App* sub) {
        sub->add_option("entry", c.entry, "catalog entry id");
        sub->add_option("--param", c.params, "parameter override name=value (repeatable)")->take_all();
        sub->add_option("--seed", c.seed, "64-bit sampling seed");
        sub->add_option("--points", c.points, "number of sample points");
        sub->add_option("--output", c.output, "also write the result to this file");
        sub->add_option("--jobs", c.jobs, "worker threads for batch work");
        sub->add_option("--perturb", c.perturb, "shift a parameter in the system only, e.g. W:+0.1");
        sub->add_option("--config", c.config, "run configuration file");
    };
    auto flow_opts = [&c](CLI::App* sub) {
        sub->add_option("--rel-tol", c.rel_tol, "relative tolerance");
        sub->add_option("--abs-tol", c.abs_tol, "absolute tolerance");
        sub->add_option("--t-end", c.t_end, "final time");
        sub->add_option("--start", c.start, "start state x1,x2,x3,p1,p2,p3");
    };
    auto* verify = app.add_subcommand("verify", "Run bracket, determining-equation, drift and rank checks");
    common(verify);
    flow_opts(verify);
    verify->add_option("--starts", c.starts, "number of sampled flow starts");
    auto* integrate = app.add_subcommand("integrate", "Integrate a trajectory and export CSV");
    common(integrate);
    flow_opts(integrate);
    integrate->add_option("--samples", c.samples, "number of equally spaced output times");
    auto* reduce = app.add_subcommand("reduce", "Check a canonical reduction");
    common(reduce);
    reduce->add_option("kind", kind, "caseI-kappa, prop32 or sec8")->required();
    reduce->add_option("--kappa", kappa, "reduced momentum for caseI-kappa");
    reduce->add_option("--gamma", gamma, "field strength for prop32");

    std::vector<const char*> argv{"magsep"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (list->parsed()) {
            out << (format == "json" ? list_json() : list_text());
            return kExitPass;
        }
        RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::load(c.config);
        if (!c.entry.empty()) cfg.entry = c.entry;
        for (const auto& p : c.params) {
            const auto [k, v] = parse_assignment(p);
            cfg.params[k] = v;
        }
        if (c.seed) cfg.seed = parse_seed(*c.seed, "--seed");
        if (c.points) cfg.points = parse_int(*c.points, "--points");
        if (c.rel_tol) cfg.rel_tol = parse_double(*c.rel_tol, "--rel-tol");
        if (c.abs_tol) cfg.abs_tol = parse_double(*c.abs_tol, "--abs-tol");
        if (c.t_end) cfg.t_end = parse_double(*c.t_end, "--t-end");
        if (c.output) cfg.output = *c.output;
        if (c.jobs) cfg.jobs = parse_int(*c.jobs, "--jobs");
        if (c.perturb) cfg.perturb = *c.perturb;
        if (c.starts) cfg.starts = parse_int(*c.starts, "--starts");
        if (c.samples) cfg.samples = parse_int(*c.samples, "--samples");
        if (cfg.points < 1) throw ValidationError("--points must be positive");
        if (cfg.starts < 1) throw ValidationError("--starts must be positive");
        std::optional<PhasePoint> start;
        if (!c.start.empty()) start = parse_start(c.start);

        if (verify->parsed()) return cmd_verify(cfg, start, out);
        if (integrate->parsed()) return cmd_integrate(cfg, start, out, err);
        return cmd_reduce(cfg, kind, kappa, gamma, out);
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const StiffnessError& e) {
        err << "integration failed: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace magsep::cli
