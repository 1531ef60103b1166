#include "simquant/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <numbers>
#include <random>

#include "simquant/acs.hpp"
#include "simquant/basis.hpp"
#include "simquant/errors.hpp"
#include "simquant/portraits.hpp"
#include "simquant/quantizer.hpp"
#include "simquant/sim2.hpp"
#include "simquant/weights.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53); }
    GroupElement group(double log_q, double p_max) {
        const CVec q = CVec::from_polar(std::exp(uniform(-log_q, log_q)), uniform(0.0, kTwoPi));
        const CVec p = CVec::from_polar(uniform(0.0, p_max), uniform(0.0, kTwoPi));
        return {q, p};
    }

private:
    std::mt19937_64 gen_;
};

struct Suite {
    std::string name;
    const RunConfig& cfg;
    Report report;

    void check(const std::string& id, const std::string& ref, double value, double target, double tol) {
        const std::string full = name + "." + id;
        const double t = cfg.tolerance(full, tol);
        report.checks.push_back({name, full, ref, value, target, t, std::isfinite(value) && std::abs(value - target) <= t});
    }
};

GridPtr field_grid(const RunConfig& cfg) {
    return build_polar_grid(cfg.grid_n_r, cfg.grid_n_theta, cfg.grid_r_min, cfg.grid_r_max);
}

double rel_l2(const Field& a, const Field& b, const Field& scale) {
    Field d = a;
    for (std::size_t i = 0; i < d.size(); ++i) d.v[i] -= b.v[i];
    return std::sqrt(norm2(d) / norm2(scale));
}

// Largest |a - b| over nodes at least `log_margin` inside the annulus in log r.
double interior_diff(const Field& a, const Field& b, double log_margin) {
    const PolarGrid& g = *a.grid;
    const int nt = g.n_theta();
    double worst = 0.0;
    for (int j = 0; j < g.n_r(); ++j) {
        if (g.s(j) < g.s(0) + log_margin || g.s(j) > g.s(g.n_r() - 1) - log_margin) continue;
        for (int k = 0; k < nt; ++k) {
            const std::size_t i = static_cast<std::size_t>(j) * nt + k;
            worst = std::max(worst, std::abs(a.v[i] - b.v[i]));
        }
    }
    return worst;
}

Field add(Field a, const Field& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a.v[i] += b.v[i];
    return a;
}

void group_suite(Suite& s) {
    Rng rng(s.cfg.seed);
    double axioms = 0.0;
    for (int k = 0; k < 50; ++k) {
        const GroupElement a = rng.group(1.0, 2.0), b = rng.group(1.0, 2.0), c = rng.group(1.0, 2.0);
        axioms = std::max(axioms, group_distance(compose(compose(a, b), c), compose(a, compose(b, c))));
        axioms = std::max(axioms, group_distance(compose(a, inverse(a)), GroupElement::identity()));
        axioms = std::max(axioms, group_distance(compose(inverse(a), a), GroupElement::identity()));
        axioms = std::max(axioms, group_distance(compose(GroupElement::identity(), a), a));
    }
    s.check("axioms", "associativity, identity and inverse of the similitude group law", axioms, 0.0, 1e-12);

    const PhaseFn bump = [](const GroupElement& g) {
        const double lq = std::log(g.q.modulus());
        return std::exp(-2.0 * lq * lq - g.p.modulus2()) * (1.0 + 0.3 * std::cos(g.q.angle()));
    };
    double haar = 0.0;
    for (int k = 0; k < 3; ++k) haar = std::max(haar, haar_invariance_residual(rng.group(0.4, 0.8), bump));
    s.check("haar", "invariance of d^2q d^2p under left translation", haar, 0.0, 1e-6);

    const GridPtr grid = field_grid(s.cfg);
    const Field phi = sample(grid, [](const CVec& x) {
        const CVec d = x - CVec{0.8, 0.3};
        return cplx(std::exp(-2.0 * d.modulus2()));
    });
    double rep = 0.0;
    for (int k = 0; k < 3; ++k) {
        const GroupElement g1 = rng.group(0.3, 1.0), g2 = rng.group(0.3, 1.0);
        rep = std::max(rep, interior_diff(uir_apply(g1, uir_apply(g2, phi)), uir_apply(compose(g1, g2), phi), 1.0));
    }
    s.check("representation", "U(g1) U(g2) = U(g1 g2) on fields, away from the annulus edges", rep, 0.0, 1e-6);

    double dm = 0.0;
    for (int k = 0; k < 3; ++k) dm = std::max(dm, check_dm_commutation(rng.group(0.3, 1.0), phi));
    s.check("dm_identity", "U C^-1 = (1/q) C^-1 U", dm, 0.0, 1e-10);
}

void basis_suite(Suite& s) {
    const double alpha = s.cfg.alpha;
    const GridPtr grid = field_grid(s.cfg);
    std::vector<BasisIndex> idx;
    for (int n = 0; n <= 2; ++n)
        for (int m = -2; m <= 2; ++m) idx.push_back({n, m, alpha});
    std::vector<Field> fields;
    for (const auto& b : idx) fields.push_back(basis_eval(b, grid));
    double gram = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b)
            gram = std::max(gram, std::abs(inner(fields[a], fields[b]) - (a == b ? 1.0 : 0.0)));
    s.check("orthonormality", "<e_nm | e_n'm'> = delta", gram, 0.0, 1e-8);

    Rng rng(s.cfg.seed + 1);
    double unit = 0.0, dual = 0.0;
    for (int k = 0; k < 3; ++k) {
        const GroupElement g = rng.group(0.5, 1.5);
        for (const auto& a : idx)
            for (const auto& b : idx) {
                const cplx u = matrix_element_U(a, b, g);
                unit = std::max(unit, std::abs(matrix_element_U(b, a, inverse(g)) - std::conj(u)));
                dual = std::max(dual, std::abs(u - matrix_element_U_panels(a, b, g)));
            }
    }
    s.check("unitarity", "U_ab(g^-1) = conj U_ba(g)", unit, 0.0, 1e-6);
    s.check("dual_path", "Laguerre and panel quadratures of U_ab agree", dual, 0.0, 1e-6);
}

void weights_suite(Suite& s) {
    const WeightPFT w = make_cs_weight(basis_fn({0, 0, s.cfg.alpha}));
    const OperatorKernel M = m_kernel(w);
    const KernelTrace kt(M);
    const cplx from_varpi = kt.weight(GroupElement::identity());
    const cplx from_omega = unit_trace(w);
    s.check("trace_varpi", "Tr M = varpi(1, 0) = 1", std::abs(from_varpi), 1.0, 1e-6);
    s.check("trace_omega", "Tr M = Omega_-2(1) / 2 pi = 1", std::abs(from_omega), 1.0, 1e-6);
    s.check("trace_agreement", "the two trace paths agree", std::abs(from_varpi - from_omega), 0.0, 1e-6);
    s.check("symmetry", "omega_hat(u, y) = u^-4 conj omega_hat(1/u, y/u)", symmetry_residual_pft(w, 100, s.cfg.seed), 0.0,
            1e-8);
    Rng rng(s.cfg.seed + 2);
    double rt = 0.0;
    for (int k = 0; k < 20; ++k) {
        const GroupElement g = rng.group(0.35, 1.0);
        const cplx exact = std::conj(matrix_element_U({0, 0, s.cfg.alpha}, {0, 0, s.cfg.alpha}, g)) / g.q.modulus();
        rt = std::max(rt, std::abs(kt.weight(g) - exact));
    }
    s.check("round_trip", "varpi -> M -> varpi", rt, 0.0, 1e-5);
}

std::vector<PlaneFn> probe_states() {
    return {[](const CVec& x) { return cplx(std::exp(-x.modulus2() / 2.0)); },
            [](const CVec& x) { return x.z() * std::exp(-x.modulus2() / 2.0); },
            [](const CVec& x) {
                const CVec d = x - CVec{0.4, 0.3};
                return cplx(std::exp(-d.modulus2() / 2.0));
            }};
}

void inversion_suite(Suite& s) {
    const WeightPFT w = make_inversion_weight();
    double om = 0.0, om2 = 0.0;
    for (const CVec& u : {CVec{0.5, 0.0}, CVec{2.0, 0.0}, CVec{1.5, 0.7}}) {
        om = std::max(om, std::abs(omega(w, 0.0, 0, 0, u) - kTwoPi / u.modulus()));
        om2 = std::max(om2, std::abs(omega(w, -2.0, 0, 0, u) - kTwoPi / u.modulus()));
    }
    s.check("omega", "Omega(u) = 2 pi / u for the inversion weight", om, 0.0, 1e-12);
    s.check("omega_minus2", "Omega_-2(u) = 2 pi / u for the inversion weight", om2, 0.0, 1e-12);
    s.check("c_M", "c_M = (2 pi)^2", c_M(w), kTwoPi * kTwoPi, 1e-12);
    s.check("trace", "Tr(I) = 1/2", inversion_trace_regularized(), 0.5, 1e-10);

    const GridPtr grid = build_polar_grid(256, 64, 1e-3, 20.0);
    const GridPtr pgrid = build_polar_grid(256, 64, 1e-3, 30.0);
    const SymbolFn one = [](const CVec&) { return cplx(1.0); };
    const std::vector<std::pair<SymbolFn, std::string>> us = {
        {[](const CVec& q) { return cplx(q.c1); }, "q1"}, {[](const CVec& q) { return cplx(q.modulus2()); }, "q^2"}};
    const auto p1 = inversion_quantize_separable(one, 1, 1), p2 = inversion_quantize_separable(one, 2, 1);
    const auto k1 = inversion_quantize_separable(one, 1, 2), k2 = inversion_quantize_separable(one, 2, 2);
    double eu = 0.0, ev = 0.0, ek = 0.0;
    for (const PlaneFn& f : probe_states()) {
        const Field phi = sample(grid, f);
        for (const auto& [u, label] : us) {
            const Field A = inversion_quantize_separable(u, 1, 0).apply(phi);
            Field exact(grid);
            for (std::size_t i = 0; i < phi.size(); ++i) exact.v[i] = u(grid->node(i)) * phi.v[i];
            eu = std::max(eu, rel_l2(A, exact, phi));
        }
        ev = std::max(ev, rel_l2(p1.apply(phi), fourier_multiplier(phi, [](const CVec& p) { return cplx(p.c1); }, pgrid), phi));
        ev = std::max(ev, rel_l2(p2.apply(phi), fourier_multiplier(phi, [](const CVec& p) { return cplx(p.c2); }, pgrid), phi));
        ek = std::max(ek, rel_l2(add(k1.apply(phi), k2.apply(phi)),
                                 fourier_multiplier(phi, [](const CVec& p) { return cplx(p.modulus2()); }, pgrid), phi));
    }
    s.check("recovery_u", "A_u(q) = u(Q), relative L2 on probe states", eu, 0.0, 1e-5);
    s.check("recovery_v", "A_v(p) = v(P), relative L2 on probe states", ev, 0.0, 1e-5);
    s.check("recovery_p2", "A_p^2 = P^2, relative L2 on probe states", ek, 0.0, 1e-5);
}

void corrected_suite(Suite& s) {
    const Fiducial fid = make_fiducial(s.cfg.alpha);
    const WeightPFT w = make_cs_weight(fid.fn);
    const auto Ap = quantize_observable(w, ObservableSpec::parse("p"));
    s.check("momentum_bracket", "A_p = P: 2 e1 + grad Omega(1) / Omega(1) = 0",
            std::max(std::abs(Ap.coefficient("bracket1")), std::abs(Ap.coefficient("bracket2"))), 0.0, 1e-5);
    const auto Ap2 = quantize_observable(w, ObservableSpec::parse("p2"));
    const double K = Ap2.coefficient("K").real();
    s.check("kinetic_K", "A_p^2 = P^2 + K / Q^2 with K = 2 pi <P^2>", K, kinetic_constant(fid), 1e-6);
    s.check("kinetic_oracle", "2 pi <P^2> = pi / (2 alpha)", kinetic_constant(fid), kPi / (2.0 * s.cfg.alpha), 1e-6);

    const SymbolFn one = [](const CVec&) { return cplx(1.0); };
    double mom = 0.0, kin = 0.0;
    for (const CVec& x : {CVec{0.7, 0.2}, CVec{-1.5, 2.0}, CVec{0.1, -0.3}}) {
        const auto c = separable_kernel_coefficients(w, one, 1, 1, x);
        const cplx closed0 = Ap.terms[1].coef * Ap.terms[1].mult(x);
        mom = std::max({mom, std::abs(c[0] - closed0), std::abs(c[1] - 1.0)});
        const auto a = separable_kernel_coefficients(w, one, 1, 2, x);
        const auto b = separable_kernel_coefficients(w, one, 2, 2, x);
        kin = std::max(kin, std::abs((a[0] + b[0]) * x.modulus2() - K));
    }
    s.check("momentum_kernel", "general kernel reproduces the closed-form A_p", mom, 0.0, 1e-4);
    s.check("kinetic_kernel", "general kernel reproduces the closed-form 1/Q^2 strength", kin, 0.0, 1e-4);
}

void acs_suite(Suite& s) {
    const double alpha = s.cfg.alpha;
    const Fiducial fid = make_fiducial(alpha);
    double cb = 0.0;
    for (double beta : {-3.0, -2.0, -1.0, 0.0, 1.0})
        if (beta < alpha - 1.0) cb = std::max(cb, std::abs(c_constant(fid, beta) / c_gamma(alpha, beta) - 1.0));
    s.check("c_beta", "c_beta = Gamma(alpha - beta - 1) / Gamma(alpha + 1), relative", cb, 0.0, 1e-8);
    const double target = c_gamma(alpha, 1.0) * c_gamma(alpha, -3.0) / c_gamma(alpha, 0.0);
    s.check("lower_symbol_q", "q^beta lower symbol factor c_beta c_(-beta-2) / c_0 at beta = 1",
            acs_lower_symbol(fid, ObservableSpec::parse("power:1")).coefficient, target, 1e-8);
    const MomentIdentities b = moment_identities(fid);
    s.check("gradient", "grad Omega(1) = -2 Omega(1) e1 - 2 pi i <(1/Q) P psi|psi>", b.gradient, 0.0, 1e-4);
    s.check("laplacian", "Lap Omega(1) = 4 Omega(1) + 8 pi i <e1.(1/Q) P psi|psi> - 2 pi <P^2 psi|psi>", b.laplacian, 0.0, 1e-4);
    s.check("log_gradient", "2 e1 + grad Omega(1) / Omega(1) = 0", b.log_gradient, 0.0, 1e-4);
    s.check("kinetic_sum", "4 + 4 e1.grad Omega(1) / Omega(1) + Lap Omega(1) / Omega(1) = -2 pi <P^2 psi|psi>", b.kinetic_sum, 0.0, 1e-4);
    s.check("inverse_q_p_real", "<(1/Q) P psi|psi> is purely imaginary for real psi",
            std::max(std::abs(b.inv_q_p[0].real()), std::abs(b.inv_q_p[1].real())), 0.0, 1e-8);
}

void wigner_suite(Suite& s) {
    const double alpha = s.cfg.alpha;
    const std::vector<BasisIndex> states = {{0, 0, alpha}, {1, 0, alpha}, {0, 1, alpha}};
    for (const BasisIndex& st : states) {
        const std::string tag = "e" + std::to_string(st.n) + std::to_string(st.m);
        const PlaneFn phi = basis_fn(st);
        const double R = support_radius(phi);
        double im = 0.0;
        for (double q : {0.3, 1.0, 2.5})
            for (double p : {0.2, 1.5})
                im = std::max(im, std::abs(wigner_aw(phi, CVec::from_polar(q, 0.4), CVec::from_polar(p, 1.1), R).imag()));
        s.check("real_" + tag, "AW is real", im, 0.0, 1e-8);
        s.check("mass_" + tag, "int AW d^2q d^2p / (2 pi)^2 = 1", wigner_mass(phi, 48, 1), 1.0, 0.02);
        double pm = 0.0;
        for (double q : {0.4, 1.1, 2.5}) {
            const CVec qv = CVec::from_polar(q, 0.7);
            pm = std::max(pm, std::abs(wigner_p_marginal(phi, qv).value - std::norm(phi(qv))));
        }
        s.check("p_marginal_" + tag, "int AW d^2p / (2 pi)^2 = |phi(q)|^2", pm, 0.0, 1e-3);
        const auto radial = [st](double r) { return basis_radial(st.n, st.alpha, r); };
        double qm = 0.0;
        for (double p : {0.3, 0.7, 1.2}) {
            const double ft = fourier_modulus2(radial, st.m, p, R);
            qm = std::max(qm, std::abs(wigner_q_marginal(radial, st.m, p, R) - ft) / std::max(1.0, ft));
        }
        s.check("q_marginal_" + tag, "int AW d^2q / (2 pi)^2 = |phi_hat(p)|^2", qm, 0.0, 1e-2);
    }
    const SeparableSymbol u{[](const CVec& q) { return cplx(q.modulus()); }, {}};
    const SeparableSymbol one{{}, {}};
    const SeparableSymbol v{{}, [](const CVec& y) { return cplx(std::exp(-y.modulus2() / 2.0)); }};
    double eu = 0.0, e1 = 0.0, ev = 0.0;
    for (const auto& [q, p] : {std::pair{CVec{1.3, 0.2}, CVec{0.5, 0.1}}, std::pair{CVec{0.6, -0.9}, CVec{-1.0, 0.7}}}) {
        eu = std::max(eu, std::abs(aw_lower_symbol(u, q, p).value - q.modulus()));
        e1 = std::max(e1, std::abs(aw_lower_symbol(one, q, p).value - 1.0));
    }
    for (double p : {0.0, 0.5, 1.0})
        ev = std::max(ev, std::abs(aw_lower_symbol(v, {1.0, 0.0}, {p, 0.0}).value - std::exp(-p * p / 2.0)));
    s.check("lower_u", "u(q) is its own lower symbol", eu, 0.0, 1e-2);
    s.check("lower_one", "1 is its own lower symbol", e1, 0.0, 1e-2);
    s.check("lower_v", "v(p) is its own lower symbol (Gaussian v)", ev, 0.0, 1e-2);
}

void resolution_suite(Suite& s) {
    const double alpha = s.cfg.alpha;
    const Field psi = basis_eval({0, 0, alpha}, default_grid());
    for (const BasisIndex& probe : {BasisIndex{0, 0, alpha}, BasisIndex{1, 0, alpha}, BasisIndex{0, 1, alpha}}) {
        const std::string tag = "e" + std::to_string(probe.n) + std::to_string(probe.m);
        s.check("diagonal_" + tag, "(1/||C psi||^2) int |<e|U psi>|^2 = 1", resolution_check(alpha, psi, probe, 64).value,
                1.0, 0.05);
    }
}

void twosheet_suite(Suite& s) {
    const std::vector<PlaneFn> fs = {
        [](const CVec& x) { return cplx(std::exp(-x.modulus2() / 2.0)); },
        [](const CVec& x) {
            const CVec d = x - CVec{0.5, 0.2};
            return cplx(std::exp(-d.modulus2()));
        },
        [](const CVec& x) { return x.z() * std::exp(-x.modulus2()); },
        [](const CVec& x) { return cplx((1.0 + x.c1 * x.c2) * std::exp(-x.modulus2() / 3.0)); },
        [](const CVec& x) { return cplx(1.0 / std::pow(1.0 + x.modulus2(), 2)); }};
    const CVec q{1.3, 0.8};
    double half = 0.0, quarter = 0.0;
    for (const PlaneFn& f : fs) {
        const cplx brute = nascent_delta_pair(q, f).extrapolated;
        const cplx smeared = smeared_delta_pair(q, f);
        half = std::max(half, std::abs(smeared - brute));
        quarter = std::max(quarter, std::abs(0.5 * smeared - brute));
    }
    s.check("half_rule", "int delta(x - q/x) phi = (1/2)[phi(sqrt q) + phi(-sqrt q)]", half, 0.0, 1e-3);
    s.check("quarter_rule", "int delta(x - q/x) phi = (1/4)[phi(sqrt q) + phi(-sqrt q)]", quarter, 0.0, 1e-3);
}

void portraits_suite(Suite& s) {
    const RunConfig& c = s.cfg;
    const PhaseSpaceSamples ps = phase_samples(c.nq_r, c.nq_t, c.q_min, c.q_max, c.np_r, c.np_t, c.p_max);
    const WeightPFT w = make_cs_weight(basis_fn({0, 0, c.alpha}));
    const PhaseSpaceField H = husimi_density(w, ps);
    s.check("husimi_nonnegative", "Husimi density >= 0", std::min(0.0, H.min_real()), 0.0, 0.0);
    s.check("husimi_mass", "int Husimi d^2q d^2p = 1", H.integrate().real(), 1.0, 0.02);
    double qm = 0.0;
    for (double q : {0.5, 2.0}) qm = std::max(qm, std::abs(q_marginal(w, {q, 0.0}) - q_marginal_direct(w, {q, 0.0}, ps)));
    s.check("q_marginal", "q-marginal formula matches the integrated density", qm, 0.0, 1e-4);
}

}  // namespace

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<const CheckResult*> Report::failures() const {
    std::vector<const CheckResult*> out;
    for (const auto& c : checks)
        if (!c.pass) out.push_back(&c);
    return out;
}

std::string Report::to_json(const RunConfig& cfg) const {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["weight"] = cfg.weight;
    j["alpha"] = cfg.alpha;
    nlohmann::ordered_json suites = nlohmann::ordered_json::array();
    for (const auto& c : checks)
        if (suites.empty() || suites.back() != c.suite) suites.push_back(c.suite);
    j["suites"] = suites;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["ref"] = c.ref;
        e["value"] = c.value;
        e["target"] = c.target;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["pass"] = all_pass();
    return j.dump(2) + "\n";
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"group",  "basis",      "weights",  "inversion", "corrected",
                                                   "acs",    "wigner",     "resolution", "twosheet", "portraits"};
    return names;
}

std::vector<std::string> selected_suites(const RunConfig& cfg) {
    if (cfg.suite == "all") return suite_names();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= cfg.suite.size()) {
        const std::size_t comma = std::min(cfg.suite.find(',', start), cfg.suite.size());
        const std::string name = cfg.suite.substr(start, comma - start);
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
            throw Error(ErrorKind::ParseError, "unknown suite '" + name + "'");
        out.push_back(name);
        start = comma + 1;
    }
    return out;
}

Report run_suite(const std::string& suite, const RunConfig& cfg) {
    static const std::map<std::string, std::function<void(Suite&)>> table = {
        {"group", group_suite},         {"basis", basis_suite},       {"weights", weights_suite},
        {"inversion", inversion_suite}, {"corrected", corrected_suite}, {"acs", acs_suite},
        {"wigner", wigner_suite},       {"resolution", resolution_suite}, {"twosheet", twosheet_suite},
        {"portraits", portraits_suite}};
    const auto it = table.find(suite);
    if (it == table.end()) throw Error(ErrorKind::ParseError, "unknown suite '" + suite + "'");
    Suite s{suite, cfg, {}};
    it->second(s);
    return s.report;
}

Report run_verify(const RunConfig& cfg) {
    Report all;
    for (const auto& name : selected_suites(cfg)) {
        Report r = run_suite(name, cfg);
        all.checks.insert(all.checks.end(), r.checks.begin(), r.checks.end());
    }
    return all;
}

}  // namespace simquant
