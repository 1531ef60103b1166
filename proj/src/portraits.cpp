#include "simquant/portraits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "simquant/basis.hpp"
#include "simquant/errors.hpp"
#include "simquant/parallel.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const cplx kI{0.0, 1.0};

// Gauss-Legendre nodes on [a, b]: panels of 8 when n is a multiple of 8, else one panel of n.
void gl_nodes(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    const int per = n % 8 == 0 ? 8 : n;
    const int panels = n / per;
    const GaussRule unit = gauss_legendre(per, 0.0, 1.0);
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
        for (int i = 0; i < per; ++i) {
            x.push_back(a + h * (k + unit.x[i]));
            w.push_back(h * unit.w[i]);
        }
}

// Panels of Gauss-Legendre nodes on [a, b] whose width at s is width(s).
template <class Width>
void adaptive_nodes(double a, double b, Width width, int per, std::vector<double>& x, std::vector<double>& w) {
    const GaussRule unit = gauss_legendre(per, 0.0, 1.0);
    double lo = a;
    while (lo < b) {
        const double h = std::min(b - lo, width(lo));
        for (int i = 0; i < per; ++i) {
            x.push_back(lo + h * unit.x[i]);
            w.push_back(h * unit.w[i]);
        }
        lo += h;
    }
}

int even_count(double n) {
    int k = static_cast<int>(std::ceil(n));
    return k + (k % 2);
}

cplx richardson(cplx a0, cplx a1, cplx a2) { return (8.0 * a2 - 6.0 * a1 + a0) / 3.0; }

// Plane rule for Omega-type integrals over the y range of a weight.
struct PlaneRule {
    std::vector<CVec> y;
    std::vector<double> w;  // area element included
};

PlaneRule plane_rule(double y_min, double y_max, int per, double width, int n_theta) {
    PlaneRule rule;
    std::vector<double> s, ws;
    adaptive_nodes(std::log(y_min), std::log(y_max), [&](double) { return width; }, per, s, ws);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = std::exp(s[i]);
        for (int k = 0; k < n_theta; ++k) {
            rule.y.push_back(CVec::from_polar(r, kTwoPi * k / n_theta));
            rule.w.push_back(ws[i] * r * r * kTwoPi / n_theta);
        }
    }
    return rule;
}

// Hankel integral int_0^R r dr g(r) J_m(p r) on the oscillation-aware rule.
template <class G>
double hankel(const G& g, int m, double p, double R) {
    std::vector<double> xs, ws;
    radial_oscillatory_rule(p, 1e-9, R, xs, ws);
    double acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) acc += ws[k] * g(xs[k]) * bessel_j(m, p * xs[k]);
    return acc;
}

double radial_value(const PlaneFn& psi, double r) { return psi({r, 0.0}).real(); }

}  // namespace

double PhaseSpaceSamples::weight(std::size_t a, std::size_t c) const {
    return w_qr[a] * (kTwoPi / q_theta.size()) * w_pr[c] * (kTwoPi / p_theta.size());
}

PhaseSpaceSamples phase_samples(int nq_r, int nq_t, double q_min, double q_max, int np_r, int np_t, double p_max) {
    if (nq_r < 1 || nq_t < 1 || np_r < 1 || np_t < 1 || !(q_min > 0.0) || !(q_max > q_min) || !(p_max > 0.0))
        throw Error(ErrorKind::BadRange, "phase-space sampling parameters");
    PhaseSpaceSamples s;
    std::vector<double> sq, wq;
    gl_nodes(nq_r, std::log(q_min), std::log(q_max), sq, wq);
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double q = std::exp(sq[i]);
        s.q_r.push_back(q);
        s.w_qr.push_back(wq[i] * q * q);
    }
    std::vector<double> sp, wp;
    gl_nodes(np_r, std::log(p_max * 1e-4), std::log(p_max), sp, wp);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double p = std::exp(sp[i]);
        s.p_r.push_back(p);
        s.w_pr.push_back(wp[i] * p * p);
    }
    for (int k = 0; k < nq_t; ++k) s.q_theta.push_back(kTwoPi * k / nq_t);
    for (int k = 0; k < np_t; ++k) s.p_theta.push_back(kTwoPi * k / np_t);
    return s;
}

cplx PhaseSpaceField::integrate(double norm) const {
    cplx acc = 0.0;
    for (std::size_t a = 0; a < s.q_r.size(); ++a)
        for (std::size_t b = 0; b < s.q_theta.size(); ++b)
            for (std::size_t c = 0; c < s.p_r.size(); ++c)
                for (std::size_t d = 0; d < s.p_theta.size(); ++d) acc += s.weight(a, c) * v[s.index(a, b, c, d)];
    return acc / norm;
}

double PhaseSpaceField::max_imag() const {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z.imag()));
    return m;
}

double PhaseSpaceField::min_real() const {
    double m = v.empty() ? 0.0 : v[0].real();
    for (const auto& z : v) m = std::min(m, z.real());
    return m;
}

PhaseSpaceField tabulate(const PhaseSpaceSamples& s, const std::function<cplx(const CVec&, const CVec&)>& F) {
    PhaseSpaceField out{s, std::vector<cplx>(s.size())};
    const std::size_t nq = s.q_r.size() * s.q_theta.size();
    parallel_for(nq, [&](std::size_t iq) {
        const std::size_t a = iq / s.q_theta.size(), b = iq % s.q_theta.size();
        for (std::size_t c = 0; c < s.p_r.size(); ++c)
            for (std::size_t d = 0; d < s.p_theta.size(); ++d) out.v[s.index(a, b, c, d)] = F(s.q(a, b), s.p(c, d));
    });
    return out;
}

bool is_radial(const PlaneFn& psi) {
    for (double r : {0.1, 0.7, 2.0, 6.0}) {
        const cplx ref = psi({r, 0.0});
        for (int k = 1; k < 8; ++k)
            if (std::abs(psi(CVec::from_polar(r, 0.77 * k)) - ref) > 1e-12 * std::max(1.0, std::abs(ref))) return false;
    }
    return true;
}

double support_radius(const PlaneFn& phi, double r_max) {
    double peak = 0.0, last = 0.0;
    std::vector<double> radii;
    for (double s = std::log(1e-6); s < std::log(r_max); s += 0.02) radii.push_back(std::exp(s));
    for (double r : radii)
        for (int k = 0; k < 16; ++k) peak = std::max(peak, std::abs(phi(CVec::from_polar(r, kTwoPi * k / 16))));
    for (double r : radii)
        for (int k = 0; k < 16; ++k)
            if (std::abs(phi(CVec::from_polar(r, kTwoPi * k / 16))) > 1e-10 * peak) last = r;
    return std::max(last * 1.05, 1e-6);
}

cplx fiducial_overlap(const PlaneFn& psi, const GroupElement& g) {
    const double q = g.q.modulus();
    if (q == 0.0) throw Error(ErrorKind::ZeroModulus, "overlap at q = 0");
    if (is_radial(psi)) {
        static thread_local const PlaneFn* cached = nullptr;
        static thread_local double R = 0.0;
        if (cached != &psi) {
            R = support_radius(psi);
            cached = &psi;
        }
        const double Rx = std::min(R, R * q);
        auto integrand = [&](double r) { return std::conj(psi({r / q, 0.0})).real() * radial_value(psi, r); };
        return kTwoPi / q * hankel(integrand, 0, g.p.modulus(), Rx);
    }
    const GridPtr grid = default_grid();
    return inner(sample(grid, uir_fn(g, psi)), sample(grid, psi));
}

cplx lower_symbol(const WeightPFT& w, const OperatorKernel& A, const GroupElement& g) {
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "lower symbol needs a pointwise weight");
    const PolarGrid& grid = *A.grid;
    const std::size_t N = A.n();
    const double qm2 = g.q.modulus2();
    std::vector<cplx> rows(N);
    parallel_for(N, [&](std::size_t i) {
        const CVec xi = grid.node(i);
        const CVec ai = cdiv(xi, g.q);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const CVec xj = grid.node(j);
            const CVec aj = cdiv(xj, g.q);
            // M_g(x_j, x_i) = e^{ip.(x_j - x_i)} M(x_j/q, x_i/q) / q^2
            const cplx m = (aj.modulus2() / ai.modulus2()) * w(cdiv(aj, ai), -aj) / kTwoPi;
            acc += grid.weight(j) * A.at(i, j) * std::polar(1.0, dot(g.p, xj - xi)) * m / qm2;
        }
        rows[i] = grid.weight(i) * acc;
    });
    cplx total = 0.0;
    for (const auto& r : rows) total += r;
    return total;
}

PhaseSpaceField lower_symbol(const WeightPFT& w, const OperatorKernel& A, const PhaseSpaceSamples& s) {
    PhaseSpaceField out{s, std::vector<cplx>(s.size())};
    for (std::size_t a = 0; a < s.q_r.size(); ++a)
        for (std::size_t b = 0; b < s.q_theta.size(); ++b)
            for (std::size_t c = 0; c < s.p_r.size(); ++c)
                for (std::size_t d = 0; d < s.p_theta.size(); ++d)
                    out.v[s.index(a, b, c, d)] = lower_symbol(w, A, GroupElement{s.q(a, b), s.p(c, d)});
    return out;
}

cplx trace_mm_formula(const WeightPFT& w, const GroupElement& g, GridPtr grid) {
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "trace formula needs a pointwise weight");
    if (!grid) grid = kernel_grid();
    const std::size_t N = grid->size();
    std::vector<cplx> rows(N);
    parallel_for(N, [&](std::size_t i) {
        const CVec x = grid->node(i);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const CVec y = grid->node(j);
            acc += grid->weight(j) * std::polar(1.0, dot(g.p, x - y)) * w(cdiv(x, y), -cdiv(x, g.q)) *
                   w(cdiv(y, x), -y);
        }
        rows[i] = grid->weight(i) * acc;
    });
    cplx total = 0.0;
    for (const auto& r : rows) total += r;
    return total / (kTwoPi * kTwoPi * g.q.modulus2());
}

cplx lower_symbol_position(const WeightPFT& w, const SymbolFn& u, const CVec& q) {
    if (w.kind == WeightKind::Inversion) return u(q);
    const double cM = c_M(w);
    const PlaneRule rule = plane_rule(std::max(w.y_min, 1e-4), std::min(w.y_max, 2e2), 8, 0.5, 32);
    std::vector<cplx> om(rule.y.size());
    double big = 0.0;
    for (std::size_t k = 0; k < rule.y.size(); ++k) {
        om[k] = w({1.0, 0.0}, rule.y[k]);
        big = std::max(big, std::abs(om[k]));
    }
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < om.size(); ++k)
        if (std::abs(om[k]) > 1e-16 * big) live.push_back(k);
    std::vector<cplx> outer(live.size());
    parallel_for(live.size(), [&](std::size_t a) {
        const std::size_t i = live[a];
        const CVec z = cmul(q, rule.y[i]);
        cplx conv = 0.0;
        for (std::size_t k : live) conv += rule.w[k] / rule.y[k].modulus2() * om[k] * u(cdiv(z, rule.y[k]));
        outer[a] = rule.w[i] * om[i] * conv;
    });
    cplx total = 0.0;
    for (const auto& v : outer) total += v;
    return total / cM;
}

cplx husimi_value(const WeightPFT& w, const GroupElement& g) {
    if (w.distributional)
        throw Error(ErrorKind::DistributionalWeight, "the inversion-weight Husimi density is a distribution");
    if (w.fiducial) return std::norm(fiducial_overlap(w.fiducial, g)) / c_M(w);
    return lower_symbol(w, m_kernel(w), g) / c_M(w);
}

PhaseSpaceField husimi_density(const WeightPFT& w, const PhaseSpaceSamples& s) {
    if (w.distributional)
        throw Error(ErrorKind::DistributionalWeight, "the inversion-weight Husimi density is a distribution");
    const double cM = c_M(w);
    if (w.fiducial && is_radial(w.fiducial)) {
        // Depends on |q| and |p| only.
        const std::size_t nq = s.q_r.size(), np = s.p_r.size();
        std::vector<double> table(nq * np);
        parallel_for(nq * np, [&](std::size_t k) {
            const GroupElement g{{s.q_r[k / np], 0.0}, {s.p_r[k % np], 0.0}};
            table[k] = std::norm(fiducial_overlap(w.fiducial, g)) / cM;
        });
        PhaseSpaceField out{s, std::vector<cplx>(s.size())};
        for (std::size_t a = 0; a < nq; ++a)
            for (std::size_t b = 0; b < s.q_theta.size(); ++b)
                for (std::size_t c = 0; c < np; ++c)
                    for (std::size_t d = 0; d < s.p_theta.size(); ++d) out.v[s.index(a, b, c, d)] = table[a * np + c];
        return out;
    }
    return tabulate(s, [&](const CVec& q, const CVec& p) { return husimi_value(w, GroupElement{q, p}); });
}

double q_marginal(const WeightPFT& w, const CVec& q) {
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "q-marginal needs a pointwise weight");
    const double cM = c_M(w);
    const PlaneRule rule = plane_rule(std::max(w.y_min, 1e-6), std::min(w.y_max, 5e2), 12, 0.5, 64);
    std::vector<cplx> part(rule.y.size());
    parallel_for(rule.y.size(), [&](std::size_t k) {
        const CVec& x = rule.y[k];
        const cplx a = w({1.0, 0.0}, x);
        part[k] = a == 0.0 ? cplx(0.0) : rule.w[k] * a * w({1.0, 0.0}, cmul(q, x));
    });
    cplx total = 0.0;
    for (const auto& v : part) total += v;
    return total.real() / cM;
}

double p_marginal(const WeightPFT& w, const CVec& p) {
    if (!w.fiducial || !is_radial(w.fiducial))
        throw Error(ErrorKind::BadRange, "the Laplacian-form p-marginal is implemented for radial fiducials");
    const PlaneFn& psi = w.fiducial;
    const double cM = c_M(w);
    const double R = support_radius(psi);
    // Omega_0(x) = (4 pi^2 / x^2) int dr/r psi(r) psi(r/x) for a radial fiducial.
    auto omega0 = [&](double x) {
        std::vector<double> s, ws;
        adaptive_nodes(std::log(1e-8), std::log(R * std::max(1.0, x)), [](double) { return 0.5; }, 12, s, ws);
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double r = std::exp(s[i]);
            acc += ws[i] * radial_value(psi, r) * radial_value(psi, r / x);
        }
        return 4.0 * kPi * kPi / (x * x) * acc;
    };
    // Lap_u varpi(1/x, u) = -2 pi x^2 int r^3 dr psi(r) psi(r x) J0(|u| r).
    auto lap_varpi = [&](double x, double u) {
        auto g = [&](double r) { return r * r * radial_value(psi, r) * radial_value(psi, r * x); };
        return -kTwoPi * x * x * hankel(g, 0, u, std::min(R, R / x));
    };
    const double pm = p.modulus();
    std::vector<double> s, ws;
    adaptive_nodes(std::log(1e-4), std::log(1e3), [](double) { return 0.25; }, 12, s, ws);
    const int n_theta = 96;
    std::vector<double> part(s.size());
    parallel_for(s.size(), [&](std::size_t i) {
        const double x = std::exp(s[i]);
        const double om = omega0(x);
        double acc = 0.0;
        for (int k = 0; k < n_theta; ++k) {
            const CVec xv = CVec::from_polar(x, kTwoPi * k / n_theta);
            const double u = (CVec{1.0, 0.0} - cconj(xv)).modulus() * pm;
            acc += lap_varpi(x, u);
        }
        part[i] = ws[i] * x * x * om * acc * kTwoPi / n_theta;
    });
    double total = 0.0;
    for (double v : part) total += v;
    return -total / (kTwoPi * cM);
}

double q_marginal_direct(const WeightPFT& w, const CVec& q, const PhaseSpaceSamples& s) {
    double acc = 0.0;
    for (std::size_t c = 0; c < s.p_r.size(); ++c)
        for (std::size_t d = 0; d < s.p_theta.size(); ++d)
            acc += s.w_pr[c] * (kTwoPi / s.p_theta.size()) * husimi_value(w, GroupElement{q, s.p(c, d)}).real();
    return acc;
}

double p_marginal_direct(const WeightPFT& w, const CVec& p, const PhaseSpaceSamples& s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < s.q_r.size(); ++a)
        for (std::size_t b = 0; b < s.q_theta.size(); ++b)
            acc += s.w_qr[a] * (kTwoPi / s.q_theta.size()) * husimi_value(w, GroupElement{s.q(a, b), p}).real();
    return acc;
}

cplx wigner_aw(const PlaneFn& phi, const CVec& q, const CVec& p, double r_support) {
    const double qm = q.modulus();
    if (qm == 0.0) throw Error(ErrorKind::ZeroModulus, "AW at q = 0");
    if (qm >= r_support) return 0.0;
    const double S = std::log(r_support / qm);
    const CVec c = cmul(cconj(p), q);  // p.(q z) = Re(c z)
    const double cm = c.modulus();
    auto freq = [&](double s) { return (cm + 0.5 * qm) * 2.0 * std::cosh(s) + 4.0; };
    std::vector<double> s_nodes, s_w;
    adaptive_nodes(0.0, S, [&](double s) { return std::min(0.5, 4.0 / freq(s)); }, 12, s_nodes, s_w);
    cplx total = 0.0;
    for (std::size_t i = 0; i < s_nodes.size(); ++i) {
        const int nt = even_count(2.0 * cm * 2.0 * std::cosh(s_nodes[i]) + 48.0);
        for (int sign : {1, -1}) {
            const double s = sign * s_nodes[i];
            const double rho = std::exp(s);
            cplx acc = 0.0;
            for (int k = 0; k < nt; ++k) {
                const CVec y = CVec::from_polar(rho, kTwoPi * k / nt);
                const CVec z = y - cinv(y);
                const double phase = c.c1 * z.c1 - c.c2 * z.c2;
                acc += std::conj(phi(cmul(q, y))) * std::polar(1.0, phase) * phi(cdiv(q, y));
            }
            total += s_w[i] * acc * (kTwoPi / nt);
        }
    }
    return 2.0 * qm * qm * total;
}

PhaseSpaceField wigner_aw(const PlaneFn& phi, const PhaseSpaceSamples& s, double r_support) {
    return tabulate(s, [&](const CVec& q, const CVec& p) { return wigner_aw(phi, q, p, r_support); });
}

PhaseSpaceField wigner_aw(const Field& phi, const PhaseSpaceSamples& s) {
    auto interp = std::make_shared<Interpolator>(phi);
    PlaneFn f = [interp](const CVec& x) { return (*interp)(x); };
    double peak = 0.0, last = phi.grid->r_min();
    for (std::size_t i = 0; i < phi.size(); ++i) peak = std::max(peak, std::abs(phi.v[i]));
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (std::abs(phi.v[i]) > 1e-10 * peak) last = std::max(last, phi.grid->r(phi.grid->radial_index(i)));
    double l1 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) l1 += phi.grid->weight(i) * std::abs(phi.v[i]);
    if (!std::isfinite(l1)) throw Error(ErrorKind::NotL1, "int |phi| is not finite on the grid");
    return wigner_aw(f, s, last);
}

Regularized wigner_p_marginal(const PlaneFn& phi, const CVec& q, double eps0) {
    const double q2 = q.modulus2();
    const CVec qq = cmul(q, q);
    PlaneFn h = [&](const CVec& x) { return 2.0 * std::conj(phi(x)) * (q2 / x.modulus2()) * phi(cdiv(qq, x)); };
    const NascentDeltaResult r = nascent_delta_pair(qq, h, eps0);
    Regularized out{};
    out.value = r.extrapolated;
    for (int e = 0; e < 3; ++e) {
        out.raw[e] = r.values[e];
        out.eps[e] = r.eps[e];
    }
    return out;
}

double wigner_q_marginal(const std::function<double(double)>& R, int m, double p, double r_support) {
    // (1/pi) int dq q^3 int ds R(q e^s) R(q e^-s) int dtheta cos(2 m theta) J0(p q |z|),
    // |z|^2 = e^{2s} + e^{-2s} - 2 cos 2 theta; the s-integrand is even.
    std::vector<double> s_nodes, s_w;
    adaptive_nodes(0.0, 12.0, [](double) { return 0.25; }, 12, s_nodes, s_w);
    std::vector<double> part(s_nodes.size());
    parallel_for(s_nodes.size(), [&](std::size_t i) {
        const double s = s_nodes[i];
        const double ch = std::cosh(s);
        const double q_hi = r_support * std::exp(-s);
        std::vector<double> qs, qw;
        adaptive_nodes(0.0, q_hi, [&](double) { return std::min(1.0, 3.0 / (p * 2.0 * ch + 1e-12)); }, 12, qs, qw);
        double acc = 0.0;
        for (std::size_t a = 0; a < qs.size(); ++a) {
            const double q = qs[a];
            const double rr = R(q * std::exp(s)) * R(q * std::exp(-s));
            if (rr == 0.0) continue;
            const int nt = even_count(2.0 * p * q * 2.0 * ch + 4.0 * std::abs(m) + 32.0);
            double ang = 0.0;
            for (int k = 0; k < nt; ++k) {
                const double th = kTwoPi * k / nt;
                const double z = std::sqrt(std::max(0.0, 2.0 * std::cosh(2.0 * s) - 2.0 * std::cos(2.0 * th)));
                ang += std::cos(2.0 * m * th) * bessel_j(0, p * q * z);
            }
            acc += qw[a] * q * q * q * rr * ang * (kTwoPi / nt);
        }
        part[i] = 2.0 * s_w[i] * acc;
    });
    double total = 0.0;
    for (double v : part) total += v;
    return total / kPi;
}

double fourier_modulus2(const std::function<double(double)>& R, int m, double p, double r_support) {
    const double h = hankel(R, m, p, r_support);
    return h * h;
}

double wigner_mass(const PlaneFn& phi, int n_r, int n_t, double q_min, double q_max) {
    std::vector<double> s, ws;
    gl_nodes(n_r, std::log(q_min), std::log(q_max), s, ws);
    std::vector<double> part(s.size() * n_t);
    parallel_for(part.size(), [&](std::size_t k) {
        const std::size_t i = k / n_t;
        const double q = std::exp(s[i]);
        const CVec qv = CVec::from_polar(q, kTwoPi * (k % n_t) / n_t);
        part[k] = ws[i] * q * q * (kTwoPi / n_t) * wigner_p_marginal(phi, qv).value.real();
    });
    double total = 0.0;
    for (double v : part) total += v;
    return total;
}

Regularized aw_lower_symbol(const SeparableSymbol& f, const CVec& q, const CVec& p, double eps0, double tol) {
    const cplx uq = f.u ? f.u(q) : cplx(1.0);
    const double pm = p.modulus();
    std::vector<double> s_nodes, s_w;
    int nt = 0;
    if (!f.vhat) {
        adaptive_nodes(-1.5, 1.5, [](double) { return 0.05; }, 8, s_nodes, s_w);
        nt = std::max(2048, even_count(2.0 * pm * 2.0 * std::cosh(1.5) + 64.0));
    } else {
        const double S = 4.0;
        adaptive_nodes(-S, S, [&](double s) { return std::min(0.1, 2.0 / (pm * 2.0 * std::cosh(s) + 1.0)); }, 8,
                       s_nodes, s_w);
        nt = std::max(256, even_count(2.0 * pm * 2.0 * std::cosh(S) + 64.0));
    }
    Regularized out{};
    for (int e = 0; e < 3; ++e) out.eps[e] = eps0 / (1 << e);
    std::vector<std::array<cplx, 3>> part(s_nodes.size());
    parallel_for(s_nodes.size(), [&](std::size_t i) {
        const double rho = std::exp(s_nodes[i]);
        std::array<cplx, 3> acc{};
        for (int k = 0; k < nt; ++k) {
            const CVec x = CVec::from_polar(rho, kTwoPi * k / nt);
            const CVec w = x - cinv(x);
            const double w2 = w.modulus2();
            const cplx ph = std::polar(1.0, dot(p, w));
            const cplx vh = f.vhat ? f.vhat(w) : cplx(0.0);
            for (int e = 0; e < 3; ++e) {
                const double eps = out.eps[e];
                // 2 pi delta(y) -> 2 pi G_eps(y); smooth transforms get the damping factor.
                const cplx val = f.vhat ? vh * std::exp(-eps * w2)
                                        : kTwoPi * std::exp(-w2 / (2.0 * eps)) / (kTwoPi * eps);
                acc[e] += ph * val;
            }
        }
        for (int e = 0; e < 3; ++e) part[i][e] = s_w[i] * acc[e] * (kTwoPi / nt);
    });
    for (int e = 0; e < 3; ++e) {
        cplx total = 0.0;
        for (const auto& v : part) total += v[e];
        out.raw[e] = uq * total / kPi;
    }
    out.value = richardson(out.raw[0], out.raw[1], out.raw[2]);
    const cplx two_level = 2.0 * out.raw[2] - out.raw[1];
    if (std::abs(out.value - two_level) > tol * std::max(1.0, std::abs(out.value)))
        throw Error(ErrorKind::RegularizationNotConverged,
                    "eps-extrapolation moved by " + std::to_string(std::abs(out.value - two_level)));
    return out;
}

PhaseSpaceField evolve_density(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& phi, double t, double alpha,
                               int n_max, int m_max, const PhaseSpaceSamples& s, UpsilonNorm norm) {
    const int nm = 2 * m_max + 1;
    const int dim = (n_max + 1) * nm;
    if (H.rows() != dim || H.cols() != dim || phi.size() != dim)
        throw Error(ErrorKind::BadRange, "H and phi must match the truncated basis");
    const double herm = (H - H.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-8 * std::max(1.0, H.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::NotHermitian, "H deviates from its adjoint by " + std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (H + H.adjoint()));
    Eigen::VectorXcd phase(dim);
    for (int k = 0; k < dim; ++k) phase(k) = std::polar(1.0, -eig.eigenvalues()(k) * t);
    const Eigen::VectorXcd chi = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint() * phi;

    const double c0 = std::exp(std::lgamma(alpha - 1.0) - std::lgamma(alpha + 1.0));
    const double pref = norm == UpsilonNorm::AsWritten ? 1.0 / (kTwoPi * c0) : 1.0 / (kTwoPi * kTwoPi * c0);
    // <e_k | U(q,p) e_00> = radial part at (|q|, |p|) times e^{-i m_k arg p}.
    const std::size_t nq = s.q_r.size(), np = s.p_r.size();
    std::vector<cplx> table(nq * np * dim);
    parallel_for(nq * np, [&](std::size_t ac) {
        const GroupElement g{{s.q_r[ac / np], 0.0}, {s.p_r[ac % np], 0.0}};
        for (int k = 0; k < dim; ++k) {
            const BasisIndex ek{k / nm, k % nm - m_max, alpha};
            try {
                table[ac * dim + k] = matrix_element_U(ek, BasisIndex{0, 0, alpha}, g);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::QuadratureNotConverged) throw;
                table[ac * dim + k] = matrix_element_U_panels(ek, BasisIndex{0, 0, alpha}, g);
            }
        }
    });
    PhaseSpaceField out{s, std::vector<cplx>(s.size())};
    for (std::size_t a = 0; a < nq; ++a)
        for (std::size_t c = 0; c < np; ++c)
            for (std::size_t d = 0; d < s.p_theta.size(); ++d) {
                cplx ov = 0.0;
                for (int k = 0; k < dim; ++k) {
                    const int m = k % nm - m_max;
                    ov += chi(k) * std::conj(table[(a * np + c) * dim + k] * std::polar(1.0, -m * s.p_theta[d]));
                }
                const double val = pref * std::norm(ov);
                for (std::size_t b = 0; b < s.q_theta.size(); ++b) out.v[s.index(a, b, c, d)] = val;
            }
    return out;
}

}  // namespace simquant
