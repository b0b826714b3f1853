#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "magsep/catalog.hpp"
#include "magsep/cli.hpp"
#include "magsep/dynamics.hpp"
#include "magsep/reduction.hpp"
#include "magsep/sampling.hpp"

using namespace magsep;
using catalog::Classification;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
};

std::string e3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double worst(const std::vector<NamedResidual>& v) {
    double w = 0.0;
    for (const auto& r : v) w = std::max(w, r.normalized());
    return w;
}

void fail(Result& r, const std::string& what) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += what;
}

Result conservation() {
    Result r;
    double bracket = 0.0, drifted = 0.0;
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        const auto& sys = inst.system;
        const auto pts = sample_points(sys, inst.sample_box, 100);
        std::vector<MomentumPolynomial> tracked{MomentumPolynomial::hamiltonian(sys)};
        for (const auto& I : inst.integrals) {
            const double b = bracket_residual(sys, I.poly, pts);
            bracket = std::max(bracket, b);
            if (b > 1e-10) fail(r, e.id + " bracket[" + I.name + "]=" + e3(b));
            tracked.push_back(I.poly);
        }
        for (const auto& pt0 : sample_points(sys, inst.start_box, 5, kDefaultSeed + 1)) {
            const auto tr = flow(sys, pt0, 100.0, 1e-12, 1e-12);
            if (tr.truncated) {
                fail(r, e.id + " truncated: " + tr.diagnostic);
                continue;
            }
            for (std::size_t k = 0; k < tracked.size(); ++k) {
                const double d = drift(tr, tracked[k], sys);
                drifted = std::max(drifted, d);
                if (d > 1e-8) fail(r, e.id + " drift[" + (k ? inst.integrals[k - 1].name : "H") + "]=" + e3(d));
            }
        }
    }
    if (r.pass) r.detail = "max bracket " + e3(bracket) + ", max drift " + e3(drifted);
    return r;
}

Result determining() {
    Result r;
    double max_res = 0.0, min_control = INFINITY;
    int specs = 0;
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        const auto pts = sample_points(inst.system, inst.sample_box, 100);
        for (const auto& I : inst.integrals) {
            if (!I.spec) continue;
            ++specs;
            const DeterminingEquations eqs(inst.system, *I.spec);
            for (const auto& pt : pts) {
                const double w = std::max(worst(eqs.residuals(pt.x)), worst(eqs.compatibility(pt.x)));
                max_res = std::max(max_res, w);
                if (w > 1e-10) {
                    fail(r, e.id + " " + I.name + " residual " + e3(w));
                    break;
                }
            }
        }
        for (const auto& p : e.params) {
            if (!p.w_only) continue;
            const auto pert = catalog::instantiate(e.id, {}, catalog::Perturbation{p.name, 0.1});
            double w = 0.0;
            for (const auto& I : pert.integrals) {
                if (!I.spec) continue;
                const DeterminingEquations eqs(pert.system, *I.spec);
                for (const auto& pt : pts) w = std::max({w, worst(eqs.residuals(pt.x)), worst(eqs.compatibility(pt.x))});
            }
            min_control = std::min(min_control, w);
            if (w <= 1e-3) fail(r, e.id + " perturbed " + p.name + " stays at " + e3(w));
        }
    }
    if (r.pass)
        r.detail = std::to_string(specs) + " specs, max residual " + e3(max_res) + ", weakest perturbed control " +
                   e3(min_control);
    return r;
}

Result independence() {
    Result r;
    std::ostringstream os;
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        if (inst.classification == Classification::maximal && inst.explicit_rank < 5) continue;
        const int want = inst.classification == Classification::integrable ? 3
                         : inst.classification == Classification::minimal  ? 4
                                                                            : 5;
        const int got = independence_rank(inst.rank_set(), inst.system, sample_points(inst.system, inst.sample_box, 20));
        if (got != want) fail(r, e.id + " rank " + std::to_string(got) + " != " + std::to_string(want));
        if (want == 5) os << (os.tellp() ? " " : "") << e.id << "=5";
    }
    if (r.pass) r.detail = "integrable 3, minimal 4, " + os.str();
    return r;
}

Result reductions() {
    Result r;
    double identity = 0.0, canon = 0.0, grid = 0.0;
    for (double g : {1.0, 2.0}) {
        const auto inst = catalog::instantiate("const.uniformB", {{"gamma", g}});
        const auto pts = sample_points(inst.system, inst.sample_box, 100);
        const AffineMap map = prop32_affine(g);
        for (const auto& pt : pts)
            identity = std::max(identity, std::fabs(hamiltonian(inst.system, map(pt)) - prop32_hamiltonian(inst.system, g, pt)));
        for (int k = 0; k < 20; ++k) canon = std::max(canon, symplectic_residual(finite_difference_jacobian(map, pts[k])));
    }
    for (double a1 : {1.0, 0.5, 2.0}) {
        const double a2 = 1.0, v11 = 1.0, v12 = 1.0, v21 = 1.0, v22 = 1.0;
        const auto info = sec8_info(a1, a2, v12, v22);
        AffineMap map = sec8_affine(a1, a2, v12, v22).then(sec8_translation(a1, a2, v11, v12, v21, v22).map);
        if (!info.degenerate) map = p3_scaling(info.lambda).then(map);
        const auto inst = catalog::instantiate("sec8.quadratic", {{"a1", a1}});
        for (const auto& pt : sample_points(inst.system, inst.sample_box, 20))
            canon = std::max(canon, symplectic_residual(finite_difference_jacobian(map, pt)));
    }
    for (const char* id : {"case1.b", "case1.c", "case1.d"}) {
        const auto inst = catalog::instantiate(id);
        const auto pts = sample_points(inst.system, inst.sample_box, 100);
        for (const auto& I : inst.integrals) {
            if (!I.planar) continue;
            for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
                const auto red = reduce_caseI(inst.system, k);
                for (const auto& pt : pts) {
                    const std::array<double, 4> z{pt.x[0], pt.x[1], pt.p[0], pt.p[1]};
                    const auto a = red.hamiltonian.gradient(k, z), b = I.planar->gradient(k, z);
                    double na = 0.0, nb = 0.0;
                    for (int i = 0; i < 4; ++i) {
                        na += a[i] * a[i];
                        nb += b[i] * b[i];
                    }
                    grid = std::max(grid, std::fabs(poisson_2d(red.hamiltonian, *I.planar, k, z)) / (1 + std::sqrt(na * nb)));
                }
            }
            grid = std::max(grid, bracket_residual(inst.system, lift_integral(*I.planar, inst.system.gauge()), pts));
        }
    }
    if (identity > 1e-12) fail(r, "prop32 identity " + e3(identity));
    if (canon > 1e-12) fail(r, "symplectic residual " + e3(canon));
    if (grid > 1e-10) fail(r, "kappa grid " + e3(grid));
    if (r.pass)
        r.detail = "identity " + e3(identity) + ", symplectic " + e3(canon) + ", kappa grid " + e3(grid);
    return r;
}

Result closure() {
    Result r;
    std::ostringstream os;
    auto closest = [](double m) {
        const auto inst = catalog::instantiate("const.cagedosc", {{"ell", 1}, {"m", m}, {"c", 1}});
        const PhasePoint pt0 = sample_points(inst.system, inst.start_box, 1).front();
        FlowOptions o;
        o.t_end = 20.0 * std::stod(inst.meta("shortest_period")) + 1.0;
        o.keep_dense = true;
        return recurrence(flow(inst.system, pt0, o), pt0, 1.0).min_distance;
    };
    for (double m : {1.0, 2.0}) {
        const double d = closest(m);
        os << "(1," << m << ") " << e3(d) << ", ";
        if (d > 1e-5) fail(r, "ratio " + std::to_string(m) + " min distance " + e3(d));
    }
    const double s = closest(1.41421356);
    os << "surrogate " << e3(s);
    if (s <= 1e-2) fail(r, "surrogate min distance " + e3(s));
    if (r.pass) r.detail = os.str() + " (evidence, not proof)";
    return r;
}

Result gauge() {
    Result r;
    const std::vector<Field> chis{
        Field::monomial(1.0, {1, 1, 0}) + Field::monomial(-2.0, {0, 0, 2}),
        Field::monomial(0.5, {3, 0, 0}) + Field::monomial(1.0, {0, 2, 1}),
        Field::monomial(-1.0, {1, 1, 1}) + Field::monomial(0.25, {0, 4, 0}) + Field(3.0),
    };
    double worst_rel = 0.0;
    for (const auto& e : catalog::list()) {
        const auto inst = catalog::instantiate(e.id);
        const auto pts = sample_points(inst.system, inst.sample_box, 100);
        for (const auto& chi : chis) {
            const auto moved = gauge_transform(inst.system, chi);
            for (const auto& pt : pts) {
                const PhasePoint q = shift_momenta(pt, chi);
                for (const auto& I : inst.integrals) {
                    const double a = I.poly.evaluate(inst.system, pt);
                    const double d = std::fabs(I.poly.evaluate(moved, q) - a) / (1 + std::fabs(a));
                    worst_rel = std::max(worst_rel, d);
                }
            }
        }
        if (worst_rel > 1e-12) fail(r, e.id + " " + e3(worst_rel));
    }
    if (r.pass) r.detail = "max relative change " + e3(worst_rel);
    return r;
}

Result determinism() {
    Result r;
    const std::vector<std::vector<std::string>> runs{
        {"verify", "case1.a"},
        {"verify", "const.cagedosc", "--jobs", "4"},
        {"integrate", "case1.d.max", "--samples", "201"},
        {"integrate", "const.uniformB", "--param", "gamma=2", "--seed", "17"},
    };
    for (const auto& args : runs) {
        std::ostringstream o1, o2, e1, e2;
        const int c1 = cli::run(args, o1, e1), c2 = cli::run(args, o2, e2);
        if (c1 != c2 || o1.str() != o2.str() || e1.str() != e2.str()) fail(r, args[0] + " " + args[1] + " differs");
        if (o1.str().empty()) fail(r, args[0] + " " + args[1] + " produced no output");
    }
    if (r.pass) r.detail = std::to_string(runs.size()) + " command pairs byte-identical";
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"conservation", conservation}, {"determining equations", determining}, {"independence", independence},
        {"reduction identities", reductions}, {"closure evidence", closure}, {"gauge covariance", gauge},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Result res;
        try {
            res = criteria[i].second();
        } catch (const std::exception& e) {
            res = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu %-22s %s  %s [%.1fs]\n", i + 1, criteria[i].first.c_str(), res.pass ? "PASS" : "FAIL",
                    res.detail.c_str(), secs);
        std::fflush(stdout);
        failed += res.pass ? 0 : 1;
    }
    std::printf("%s\n", failed ? "acceptance: FAIL" : "acceptance: PASS");
    return failed ? 1 : 0;
}
