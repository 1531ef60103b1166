#include "simquant/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "simquant/errors.hpp"
#include "simquant/parallel.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kMaxNodes = 16384;

double log_norm(int n, double alpha) {
    return 0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + alpha + 1.0) - std::log(kTwoPi));
}

void check_pair(const BasisIndex& a, const BasisIndex& b) {
    if (a.n < 0 || b.n < 0) throw Error(ErrorKind::BadRange, "basis index n < 0");
    if (!(a.alpha > 0.0) || a.alpha != b.alpha) throw Error(ErrorKind::BadRange, "alpha must be positive and shared");
}

cplx angular_prefactor(const BasisIndex& i1, const BasisIndex& i2, const GroupElement& g) {
    const int dm = i1.m - i2.m;
    const double theta = g.q.angle();
    const double psi = g.p.modulus() > 0.0 ? g.p.angle() : 0.0;
    const cplx i_pow = std::pow(cplx(0.0, 1.0), dm);
    return kTwoPi * i_pow * std::polar(1.0 / g.q.modulus(), -i2.m * theta - dm * psi);
}

double laguerre_radial_integral(const BasisIndex& i1, const BasisIndex& i2, double q, double p, int nodes) {
    const double alpha = i1.alpha;
    const double c = 0.5 * (1.0 + 1.0 / q);
    const GaussRule& rule = gauss_laguerre(nodes, alpha);
    const int dm = i1.m - i2.m;
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double t = rule.x[k];
        if (rule.w[k] == 0.0) continue;
        const double r = t / c;
        acc += rule.w[k] * laguerre(i1.n, alpha, r) * laguerre(i2.n, alpha, r / q) * bessel_j(dm, p * r);
    }
    const double pref = std::exp(log_norm(i1.n, alpha) + log_norm(i2.n, alpha) - 0.5 * (alpha - 1.0) * std::log(q) -
                                 (alpha + 1.0) * std::log(c));
    return pref * acc;
}

}  // namespace

double basis_radial(int n, double alpha, double r) {
    if (r <= 0.0) return 0.0;
    return std::exp(log_norm(n, alpha) - 0.5 * r + 0.5 * (alpha - 1.0) * std::log(r)) * laguerre(n, alpha, r);
}

PlaneFn basis_fn(const BasisIndex& idx) {
    if (!(idx.alpha > 0.0)) throw Error(ErrorKind::BadRange, "alpha must be positive");
    return [idx](const CVec& x) { return basis_radial(idx.n, idx.alpha, x.modulus()) * std::polar(1.0, idx.m * x.angle()); };
}

Field basis_eval(const BasisIndex& idx, GridPtr grid) { return sample(std::move(grid), basis_fn(idx)); }

int matrix_element_nodes(double q, double p, double alpha) {
    const double c = 0.5 * (1.0 + 1.0 / q);
    const double x_max = (40.0 + 2.0 * alpha) / c;
    const double want = std::max(200.0, 8.0 * p * x_max);
    int n = 256;
    while (n < want && n < kMaxNodes) n *= 2;
    return n;
}

cplx matrix_element_U(const BasisIndex& idx1, const BasisIndex& idx2, const GroupElement& g, double tol) {
    check_pair(idx1, idx2);
    const double q = g.q.modulus();
    if (q == 0.0) throw Error(ErrorKind::ZeroModulus, "matrix element at q = 0");
    const double p = g.p.modulus();
    int n = matrix_element_nodes(q, p, idx1.alpha);
    double prev = laguerre_radial_integral(idx1, idx2, q, p, n);
    while (true) {
        if (2 * n > kMaxNodes)
            throw Error(ErrorKind::QuadratureNotConverged,
                        "Laguerre-Bessel integral unresolved at " + std::to_string(kMaxNodes) + " nodes");
        n *= 2;
        const double next = laguerre_radial_integral(idx1, idx2, q, p, n);
        if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) return angular_prefactor(idx1, idx2, g) * next;
        prev = next;
    }
}

cplx matrix_element_U_panels(const BasisIndex& idx1, const BasisIndex& idx2, const GroupElement& g) {
    check_pair(idx1, idx2);
    const double q = g.q.modulus();
    if (q == 0.0) throw Error(ErrorKind::ZeroModulus, "matrix element at q = 0");
    const double p = g.p.modulus();
    const double c = 0.5 * (1.0 + 1.0 / q);
    const double R = (60.0 + 2.0 * idx1.alpha + 4.0 * std::max(idx1.n, idx2.n)) / c;
    std::vector<double> xs, ws;
    radial_oscillatory_rule(p, 1e-9 * std::min(1.0, q), R, xs, ws);
    const int dm = idx1.m - idx2.m;
    double acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
        acc += ws[k] * basis_radial(idx1.n, idx1.alpha, xs[k]) * basis_radial(idx2.n, idx2.alpha, xs[k] / q) *
               bessel_j(dm, p * xs[k]);
    return angular_prefactor(idx1, idx2, g) * acc;
}

ResolutionEstimate resolution_check(double alpha, const Field& psi, const BasisIndex& probe_in, int samples) {
    BasisIndex probe = probe_in;
    probe.alpha = alpha;
    const ModeStack ms = angular_decompose(psi, std::min(4, (psi.grid->n_theta() - 1) / 2));
    double radial_mass = 0.0, other = 0.0;
    for (int m = -ms.m_max; m <= ms.m_max; ++m)
        for (const auto& v : ms.mode(m)) (m == 0 ? radial_mass : other) += std::norm(v);
    if (other > 1e-16 * radial_mass) throw Error(ErrorKind::BadRange, "resolution_check needs a radial fiducial");
    const RadialProfile prof(psi.grid, ms.mode(0));

    // c = int |psi|^2 / x^2 d^2x; ||C psi||^2 = (2 pi)^2 c.
    Field weighted(psi.grid);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double r = psi.grid->r(psi.grid->radial_index(i));
        weighted.v[i] = std::norm(psi.v[i]) / (r * r);
    }
    const double c_dm = integrate_plane(weighted).real();

    const double q_min = 0.02, q_max = 50.0, p_max = 40.0;
    const double probe_norm = std::exp(log_norm(probe.n, alpha));
    auto probe_radial = [&](double r) {
        return probe_norm * std::exp(-0.5 * r + 0.5 * (alpha - 1.0) * std::log(r)) * laguerre(probe.n, alpha, r);
    };
    // Radius beyond which r |e_probe(r) psi(r/q)| stays below 1e-9 of its peak.
    auto support = [&](double q) {
        double peak = 0.0, last = 0.0;
        const double hs = 0.02;
        for (double s = std::log(1e-6); s < std::log(1e3); s += hs) {
            const double r = std::exp(s);
            const double a = r * std::abs(probe_radial(r) * prof(r / q));
            if (a > peak) peak = a;
            if (a > 1e-9 * peak) last = r;
        }
        return std::max(last * std::exp(hs), 1e-6);
    };

    auto estimate = [&](int n_s, int per) {
        const int panels_s = std::max(1, n_s / per);
        const int panels_p = std::max(1, 2 * n_s / per);
        const GaussRule unit = gauss_legendre(per, 0.0, 1.0);
        std::vector<double> s_nodes, s_w, p_nodes, p_w;
        const double s_lo = std::log(q_min), s_hi = std::log(q_max);
        for (int b = 0; b < panels_s; ++b)
            for (int i = 0; i < per; ++i) {
                const double h = (s_hi - s_lo) / panels_s;
                s_nodes.push_back(s_lo + h * (b + unit.x[i]));
                s_w.push_back(h * unit.w[i]);
            }
        for (int b = 0; b < panels_p; ++b)
            for (int i = 0; i < per; ++i) {
                const double h = p_max / panels_p;
                p_nodes.push_back(h * (b + unit.x[i]));
                p_w.push_back(h * unit.w[i]);
            }
        std::vector<double> rows(s_nodes.size(), 0.0);
        parallel_for(s_nodes.size(), [&](std::size_t a) {
            const double q = std::exp(s_nodes[a]);
            const double R = support(q);
            std::vector<double> xs, ws;
            double row = 0.0;
            for (std::size_t b = 0; b < p_nodes.size(); ++b) {
                const double p = p_nodes[b];
                radial_oscillatory_rule(p, 1e-9 * std::min(1.0, q), R, xs, ws);
                cplx acc = 0.0;
                for (std::size_t k = 0; k < xs.size(); ++k)
                    acc += ws[k] * probe_radial(xs[k]) * prof(xs[k] / q) * bessel_j(probe.m, p * xs[k]);
                row += p_w[b] * p * std::norm(kTwoPi / q * acc);
            }
            rows[a] = s_w[a] * q * q * row;
        });
        double total = 0.0;
        for (double v : rows) total += v;
        return total / c_dm;
    };
    ResolutionEstimate res;
    res.value = estimate(samples, 16);
    res.error_bar = std::abs(res.value - estimate(samples, 10));
    res.box_q_min = q_min;
    res.box_q_max = q_max;
    res.box_p_max = p_max;
    return res;
}

}  // namespace simquant
