// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "simquant/acs.hpp"
#include "simquant/cplane.hpp"
#include "simquant/quantizer.hpp"
#include "simquant/verify.hpp"
#include "simquant/weights.hpp"

using namespace simquant;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void suite_into(const std::string& name, Outcome& o) {
    const Report r = run_suite(name, RunConfig{});
    for (const auto* c : r.failures())
        o.require(false, c->name + " = " + num(c->value) + " (target " + num(c->target) + ", tol " + num(c->tolerance) + ")");
}

template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

std::string run_capture(const std::string& cmd, int& code) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int status = pclose(p);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

void group_criterion(Outcome& o) { suite_into("group", o); }
void basis_criterion(Outcome& o) { suite_into("basis", o); }
void weights_criterion(Outcome& o) { suite_into("weights", o); }

void inversion_criterion(Outcome& o) {
    suite_into("inversion", o);
    const WeightPFT w = make_inversion_weight();
    for (const CVec& u : {CVec{1.0, 0.0}, CVec{2.0, 0.5}}) {
        const double om = omega(w, 0.0, 0, 0, u).real();
        o.require(std::abs(om - 2.0 * kPi / u.modulus()) < 1e-12,
                  "Omega(" + num(u.modulus()) + ") = " + num(om) + " vs 2pi/u = " + num(2.0 * kPi / u.modulus()));
    }
    o.require(std::abs(c_M(w) - 4.0 * kPi * kPi) < 1e-12, "c_M = " + num(c_M(w)));
}

void corrected_criterion(Outcome& o) {
    suite_into("corrected", o);
    const Fiducial psi = make_fiducial(3.0);
    const double p2 = 2.0 * kPi * simpson([&](double r) { return psi.radial_deriv(r) * psi.radial_deriv(r) * r; }, 0.0, 80.0);
    const double oracle = 2.0 * kPi * p2;
    const double K = quantize_observable(make_cs_weight(psi.fn), ObservableSpec::parse("p2")).coefficient("K").real();
    o.require(std::abs(K - oracle) < 1e-6, "K = " + num(K) + " vs 2pi<P^2> = " + num(oracle));
}

void acs_criterion(Outcome& o) {
    suite_into("acs", o);
    const Fiducial psi = make_fiducial(3.0);
    for (double beta : {-3.0, -2.0, -1.0, 0.0, 1.0}) {
        const double ref = std::tgamma(3.0 - beta - 1.0) / std::tgamma(4.0);
        o.require(std::abs(c_constant(psi, beta) - ref) < 1e-8, "c_" + num(beta) + " = " + num(c_constant(psi, beta)));
    }
}

void wigner_criterion(Outcome& o) { suite_into("wigner", o); }
void resolution_criterion(Outcome& o) { suite_into("resolution", o); }

void twosheet_criterion(Outcome& o) {
    suite_into("twosheet", o);
    const std::vector<PlaneFn> fns = {
        [](const CVec& x) { return cplx(std::exp(-x.modulus2())); },
        [](const CVec& x) { return cplx(x.c1 * std::exp(-0.5 * x.modulus2())); },
        [](const CVec& x) { return cplx(std::cos(x.c2), 0.3 * x.c1) * std::exp(-0.7 * x.modulus2()); },
        [](const CVec& x) { return cplx(1.0 / (1.0 + x.modulus2())); },
        [](const CVec& x) { return cplx(x.c1 * x.c2 * std::exp(-x.modulus2())); },
    };
    const CVec q{0.9, 0.7};
    double worst = 0.0;
    for (const auto& f : fns)
        worst = std::max(worst, std::abs(smeared_delta_pair(q, f) - nascent_delta_pair(q, f).extrapolated));
    o.require(worst < 1e-3, "smeared pair vs nascent delta: max difference " + num(worst));
}

void determinism_criterion(Outcome& o) {
    const std::string cmd = std::string(SIMQUANT_CLI_PATH) + " verify --seed 1 2>/dev/null";
    int c1 = 0, c2 = 0;
    const std::string a = run_capture(cmd, c1);
    const std::string b = run_capture(cmd, c2);
    o.require(!a.empty() && c1 >= 0 && c1 <= 1, "first run exit code " + std::to_string(c1));
    o.require(a == b, "reports differ between runs");
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "group and representation", 10.0, group_criterion},
        {2, "basis orthonormality and matrix elements", 60.0, basis_criterion},
        {3, "weight traces, symmetry and round trip", 60.0, weights_criterion},
        {4, "inversion-weight exactness", 30.0, inversion_criterion},
        {5, "corrected momentum and kinetic formulas", 120.0, corrected_criterion},
        {6, "ACS constants and moment identities", 30.0, acs_criterion},
        {7, "affine Wigner function", 180.0, wigner_criterion},
        {8, "resolution of the identity", 120.0, resolution_criterion},
        {9, "two-sheet delta rule", 10.0, twosheet_criterion},
        {10, "verify determinism", 600.0, determinism_criterion},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(dt <= c.budget_s, "runtime " + num(dt) + " s over budget " + num(c.budget_s) + " s");
        std::printf("%s  criterion %2d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), dt);
        for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
