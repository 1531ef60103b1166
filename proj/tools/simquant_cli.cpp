#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "simquant/acs.hpp"
#include "simquant/basis.hpp"
#include "simquant/config.hpp"
#include "simquant/errors.hpp"
#include "simquant/portraits.hpp"
#include "simquant/quantizer.hpp"
#include "simquant/verify.hpp"
#include "simquant/weights.hpp"

using namespace simquant;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitNumeric = 3;

struct Options {
    std::string config_path;
    std::vector<std::string> sets;  // key=value overrides
    std::optional<std::string> weight, observable, out, suite;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    bool legacy = false;
    std::string emit = "coeffs.json";
    std::string kind = "husimi";
    std::string state = "0,0";
    std::string g = "1.2,0.3,0.4,-0.2";
    int n_max = 2, m_max = 2;
};

RunConfig build_config(const Options& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : parse_config_file(o.config_path);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(ErrorKind::ParseError, "--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.weight) cfg.weight = *o.weight;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.observable) cfg.observable = *o.observable;
    if (o.out) cfg.out = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.suite) cfg.suite = *o.suite;
    if (o.legacy) cfg.legacy_6_28 = true;
    validate_config(cfg);
    return cfg;
}

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& flag) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, flag + ": not a number: '" + item + "'");
        }
    }
    if (v.size() != count) throw Error(ErrorKind::ParseError, flag + " expects " + std::to_string(count) + " values");
    return v;
}

WeightPFT make_weight(const RunConfig& cfg) {
    if (cfg.weight == "inversion") return make_inversion_weight();
    return make_cs_weight(make_fiducial(cfg.alpha).fn);
}

std::filesystem::path out_file(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out);
    return std::filesystem::path(cfg.out) / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ValidationError, "cannot write '" + path.string() + "'");
    f << text;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

int cmd_verify(const RunConfig& cfg, bool write_file) {
    const Report r = run_verify(cfg);
    const std::string text = r.to_json(cfg);
    std::cout << text;
    if (write_file) write_text(out_file(cfg, "verify.json"), text);
    for (const auto* c : r.failures())
        std::cerr << "FAIL " << c->name << ": value " << fmt(c->value) << " target " << fmt(c->target) << " tolerance "
                  << fmt(c->tolerance) << "\n";
    return r.all_pass() ? kExitPass : kExitFail;
}

int cmd_quantize(const RunConfig& cfg, const Options& o) {
    const WeightPFT w = make_weight(cfg);
    const ObservableSpec spec = ObservableSpec::parse(cfg.observable);
    if (o.emit == "coeffs.json") {
        const ClosedFormOperator op = quantize_observable(w, spec, cfg.legacy_6_28);
        json j;
        j["weight"] = cfg.weight;
        j["alpha"] = cfg.alpha;
        j["observable"] = cfg.observable;
        j["legacy_6_28"] = cfg.legacy_6_28;
        json terms = json::array();
        for (const auto& t : op.terms) terms.push_back({{"label", t.label}, {"coef", cjson(t.coef)}});
        j["terms"] = terms;
        json coefs = json::object();
        for (const auto& [k, v] : op.coefficients) coefs[k] = cjson(v);
        j["coefficients"] = coefs;
        const std::string text = j.dump(2) + "\n";
        write_text(out_file(cfg, "coeffs.json"), text);
        std::cout << text;
        return kExitPass;
    }
    if (o.emit == "matrix.csv") {
        const ClosedFormOperator op = quantize_observable(w, spec, cfg.legacy_6_28);
        const Eigen::MatrixXcd M =
            to_basis_matrix([&](const Field& f) { return op.apply(f); }, cfg.alpha, o.n_max, o.m_max);
        const int nm = 2 * o.m_max + 1;
        std::ostringstream csv;
        csv << "n,m,n',m',Re,Im\n";
        for (int a = 0; a < M.rows(); ++a)
            for (int b = 0; b < M.cols(); ++b)
                csv << a / nm << ',' << a % nm - o.m_max << ',' << b / nm << ',' << b % nm - o.m_max << ','
                    << fmt(M(a, b).real()) << ',' << fmt(M(a, b).imag()) << '\n';
        write_text(out_file(cfg, "matrix.csv"), csv.str());
        std::cout << json({{"file", out_file(cfg, "matrix.csv").string()}, {"rows", M.rows()}}).dump() << "\n";
        return kExitPass;
    }
    if (o.emit == "kernel.csv") {
        const OperatorKernel A = quantize_kernel(w, spec);
        std::ostringstream csv;
        csv << "i,j,x1,x2,x1',x2',Re,Im\n";
        std::size_t rows = 0;
        for (std::size_t i = 0; i < A.n(); ++i)
            for (std::size_t j = 0; j < A.n(); ++j) {
                const cplx v = A.at(i, j);
                if (v == 0.0) continue;
                const CVec x = A.grid->node(i), xp = A.grid->node(j);
                csv << i << ',' << j << ',' << fmt(x.c1) << ',' << fmt(x.c2) << ',' << fmt(xp.c1) << ','
                    << fmt(xp.c2) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
                ++rows;
            }
        write_text(out_file(cfg, "kernel.csv"), csv.str());
        std::cout << json({{"file", out_file(cfg, "kernel.csv").string()}, {"rows", rows}}).dump() << "\n";
        return kExitPass;
    }
    throw Error(ErrorKind::ParseError, "--emit must be kernel.csv, matrix.csv or coeffs.json");
}

std::string phase_csv(const PhaseSpaceField& F) {
    std::ostringstream csv;
    csv << "q_r,q_theta,p1,p2,value\n";
    const auto& s = F.s;
    for (std::size_t a = 0; a < s.q_r.size(); ++a)
        for (std::size_t b = 0; b < s.q_theta.size(); ++b)
            for (std::size_t c = 0; c < s.p_r.size(); ++c)
                for (std::size_t d = 0; d < s.p_theta.size(); ++d) {
                    const CVec p = s.p(c, d);
                    csv << fmt(s.q_r[a]) << ',' << fmt(s.q_theta[b]) << ',' << fmt(p.c1) << ',' << fmt(p.c2) << ','
                        << fmt(F.v[s.index(a, b, c, d)].real()) << '\n';
                }
    return csv.str();
}

PhaseSpaceSamples cfg_samples(const RunConfig& cfg) {
    return phase_samples(cfg.nq_r, cfg.nq_t, cfg.q_min, cfg.q_max, cfg.np_r, cfg.np_t, cfg.p_max);
}

int cmd_portrait(const RunConfig& cfg, const Options& o) {
    const WeightPFT w = make_weight(cfg);
    const PhaseSpaceSamples s = cfg_samples(cfg);
    json j;
    j["weight"] = cfg.weight;
    j["alpha"] = cfg.alpha;
    j["kind"] = o.kind;
    PhaseSpaceField F;
    if (o.kind == "husimi") {
        F = husimi_density(w, s);
        j["mass"] = F.integrate().real();
        j["min_value"] = F.min_real();
        j["realness_residual"] = F.max_imag();
        double qm = 0.0;
        for (double q : {0.5, 1.0, 2.0}) {
            const CVec qv{q, 0.0};
            const double ref = q_marginal(w, qv);
            qm = std::max(qm, std::abs(q_marginal_direct(w, qv, s) - ref) / ref);
        }
        j["q_marginal_error"] = qm;
    } else if (o.kind == "lower") {
        if (cfg.weight != "cs") throw Error(ErrorKind::DistributionalWeight, "lower-symbol portraits use the cs weight");
        const AcsSymbol sym = acs_lower_symbol(make_fiducial(cfg.alpha), ObservableSpec::parse(cfg.observable));
        F = tabulate(s, [&](const CVec& q, const CVec& p) { return cplx(sym.eval(q, p)); });
        j["symbol"] = sym.name;
        j["coefficient"] = sym.coefficient;
        j["inverse_square"] = sym.inverse_square;
    } else {
        throw Error(ErrorKind::ParseError, "--kind must be husimi or lower");
    }
    write_text(out_file(cfg, "portrait.csv"), phase_csv(F));
    std::cout << j.dump(2) << "\n";
    return kExitPass;
}

// Coarse sampling for the Wigner function unless any samples.* key was changed.
PhaseSpaceSamples wigner_samples(const RunConfig& cfg) {
    const RunConfig d;
    const bool custom = cfg.nq_r != d.nq_r || cfg.nq_t != d.nq_t || cfg.np_r != d.np_r || cfg.np_t != d.np_t ||
                        cfg.q_min != d.q_min || cfg.q_max != d.q_max || cfg.p_max != d.p_max;
    return custom ? cfg_samples(cfg) : phase_samples(8, 4, 0.1, 10.0, 6, 4, 4.0);
}

int cmd_wigner(const RunConfig& cfg, const Options& o) {
    const std::vector<double> nm = parse_list(o.state, 2, "--state");
    const BasisIndex st{static_cast<int>(nm[0]), static_cast<int>(nm[1]), cfg.alpha};
    if (st.n < 0) throw Error(ErrorKind::ParseError, "--state needs n >= 0");
    const PlaneFn phi = basis_fn(st);
    const double R = support_radius(phi);
    const PhaseSpaceSamples s = wigner_samples(cfg);
    const PhaseSpaceField F = wigner_aw(phi, s, R);
    json j;
    j["state"] = {st.n, st.m};
    j["alpha"] = cfg.alpha;
    j["realness_residual"] = F.max_imag();
    // |e_nm|^2 is rotation invariant, so one angle suffices.
    j["mass"] = wigner_mass(phi, 48, 1);
    double pm = 0.0;
    for (double q : {0.5, 1.5}) {
        const CVec qv = CVec::from_polar(q, 0.7);
        pm = std::max(pm, std::abs(wigner_p_marginal(phi, qv).value - std::norm(phi(qv))));
    }
    j["p_marginal_error"] = pm;
    const auto radial = [st](double r) { return basis_radial(st.n, st.alpha, r); };
    double qm = 0.0;
    for (double p : {0.5, 1.0}) {
        const double ft = fourier_modulus2(radial, st.m, p, R);
        qm = std::max(qm, std::abs(wigner_q_marginal(radial, st.m, p, R) - ft) / std::max(1.0, ft));
    }
    j["q_marginal_error"] = qm;
    write_text(out_file(cfg, "wigner.csv"), phase_csv(F));
    std::cout << j.dump(2) << "\n";
    return kExitPass;
}

int cmd_basis(const RunConfig& cfg, const Options& o) {
    const std::vector<double> gv = parse_list(o.g, 4, "--g");
    const GroupElement g{{gv[0], gv[1]}, {gv[2], gv[3]}};
    std::ostringstream csv;
    csv << "n,m,n',m',Re,Im\n";
    for (int n = 0; n <= o.n_max; ++n)
        for (int m = -o.m_max; m <= o.m_max; ++m)
            for (int n2 = 0; n2 <= o.n_max; ++n2)
                for (int m2 = -o.m_max; m2 <= o.m_max; ++m2) {
                    const BasisIndex a{n, m, cfg.alpha}, b{n2, m2, cfg.alpha};
                    cplx v;
                    try {
                        v = matrix_element_U(a, b, g);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::QuadratureNotConverged) throw;
                        v = matrix_element_U_panels(a, b, g);
                    }
                    csv << n << ',' << m << ',' << n2 << ',' << m2 << ',' << fmt(v.real()) << ',' << fmt(v.imag())
                        << '\n';
                }
    write_text(out_file(cfg, "basis.csv"), csv.str());
    std::cout << csv.str();
    return kExitPass;
}

int cmd_acs(const RunConfig& cfg) {
    const Fiducial psi = make_fiducial(cfg.alpha);
    const CTable t = fubini_study(psi);
    json j;
    j["alpha"] = t.alpha;
    json cb = json::array();
    for (const auto& [beta, c] : t.c_beta) cb.push_back({{"beta", beta}, {"c", c}});
    j["c_beta"] = cb;
    j["c_m2_10"] = t.c_m2_10;
    j["c_m2_01"] = t.c_m2_01;
    j["p2"] = t.p2;
    j["gamma2"] = t.gamma2;
    j["K"] = t.K;
    j["metric"] = {{"A", t.A}, {"B", t.B}, {"C", t.C}, {"D", t.D}, {"E", t.E}, {"F", t.F}, {"G", t.G}};
    const std::string text = j.dump(2) + "\n";
    write_text(out_file(cfg, "acs.json"), text);
    std::cout << text;
    return kExitPass;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Divergent:
        case ErrorKind::QuadratureNotConverged:
        case ErrorKind::RegularizationNotConverged:
            return kExitNumeric;
        default:
            return kExitUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simquant: affine integral quantization on the punctured plane"};
    app.require_subcommand(1, 1);
    Options o;
    const auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "key=value config file");
        sub->add_option("--set", o.sets, "config override key=value (repeatable)");
        sub->add_option("--weight", o.weight, "cs | inversion");
        sub->add_option("--alpha", o.alpha, "fiducial exponent");
        sub->add_option("--observable", o.observable, "one | power:B | q[:I] | p[:I] | p2 | qdotp | qcrossp | upn:U,I,N");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "sampling seed");
        sub->add_option("--suite", o.suite, "all or a comma-separated list of suites");
        sub->add_flag("--legacy-6-28", o.legacy, "+ sign on the Q x P term of the dilation operator");
    };
    CLI::App* verify = app.add_subcommand("verify", "run the identity checks and print a JSON report");
    CLI::App* quantize = app.add_subcommand("quantize", "quantized observable as coefficients, basis matrix or kernel");
    CLI::App* portrait = app.add_subcommand("portrait", "Husimi density or lower symbol on phase-space samples");
    CLI::App* wigner = app.add_subcommand("wigner", "affine Wigner function of a basis state");
    CLI::App* basis = app.add_subcommand("basis", "matrix elements <e_nm|U(g)|e_n'm'> as CSV");
    CLI::App* acs = app.add_subcommand("acs", "Fubini-Study table and kinetic constant as JSON");
    for (CLI::App* sub : {verify, quantize, portrait, wigner, basis, acs}) common(sub);
    quantize->add_option("--emit", o.emit, "kernel.csv | matrix.csv | coeffs.json");
    for (CLI::App* sub : {quantize, basis}) {
        sub->add_option("--n-max", o.n_max, "largest radial index")->check(CLI::NonNegativeNumber);
        sub->add_option("--m-max", o.m_max, "largest |m|")->check(CLI::NonNegativeNumber);
    }
    portrait->add_option("--kind", o.kind, "husimi | lower");
    wigner->add_option("--state", o.state, "basis state n,m");
    basis->add_option("--g", o.g, "group element q1,q2,p1,p2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }

    try {
        const RunConfig cfg = build_config(o);
        if (verify->parsed()) return cmd_verify(cfg, o.out.has_value());
        if (quantize->parsed()) return cmd_quantize(cfg, o);
        if (portrait->parsed()) return cmd_portrait(cfg, o);
        if (wigner->parsed()) return cmd_wigner(cfg, o);
        if (basis->parsed()) return cmd_basis(cfg, o);
        return cmd_acs(cfg);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
}
