#include "simquant/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "simquant/errors.hpp"
#include "simquant/parallel.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Radial Gauss-Legendre panels in s = log y and trapezoid in angle.
struct PlaneRule {
    std::vector<double> r, wr;
    int n_theta = 64;
};

PlaneRule plane_rule(double y_min, double y_max, int n_theta) {
    static const GaussRule unit = gauss_legendre(16, 0.0, 1.0);
    PlaneRule rule;
    rule.n_theta = n_theta;
    const double s_lo = std::log(y_min), s_hi = std::log(y_max);
    const int panels = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / 0.5)));
    const double h = (s_hi - s_lo) / panels;
    for (int b = 0; b < panels; ++b)
        for (std::size_t i = 0; i < unit.x.size(); ++i) {
            const double r = std::exp(s_lo + h * (b + unit.x[i]));
            rule.r.push_back(r);
            rule.wr.push_back(h * unit.w[i] * r * r);
        }
    return rule;
}

double omega_inversion(double beta, int nu1, int nu2, const CVec& u) {
    const double um = u.modulus();
    if (um == 0.0) throw Error(ErrorKind::ZeroModulus, "Omega at u = 0");
    // Principal root, smooth around u = 1 where the closed forms need it.
    const cplx root = std::sqrt(u.z());
    return (kTwoPi / um) * std::pow(std::abs(root), -(beta + 2.0)) * std::pow(root.real(), nu1) *
           std::pow(root.imag(), nu2);
}

}  // namespace

cplx WeightPFT::operator()(const CVec& u, const CVec& y) const {
    if (distributional || !fn)
        throw Error(ErrorKind::DistributionalWeight, label + ": omega_hat contains a delta and has no point values");
    return fn(u, y);
}

WeightPFT make_cs_weight(PlaneFn psi, std::string label) {
    WeightPFT w;
    w.kind = WeightKind::CoherentState;
    w.label = std::move(label);
    w.fiducial = psi;
    w.fn = [psi](const CVec& u, const CVec& v) {
        const double u2 = u.modulus2();
        return kTwoPi / u2 * psi(-v) * std::conj(psi(-cdiv(v, u)));
    };
    return w;
}

WeightPFT make_cs_weight(const Field& psi, std::string label) {
    const PolarGrid& g = *psi.grid;
    double total = 0.0, inner = 0.0;
    const int inner_rows = std::max(1, g.n_r() / 32);
    for (int j = 0; j < g.n_r(); ++j) {
        double shell = 0.0;
        for (int k = 0; k < g.n_theta(); ++k) shell += std::norm(psi.v[static_cast<std::size_t>(j) * g.n_theta() + k]);
        const double c = g.radial_weight(j) * shell / (g.r(j) * g.r(j));
        total += c;
        if (j < inner_rows) inner += c;
    }
    if (!(total > 0.0) || inner > 1e-3 * total)
        throw Error(ErrorKind::NotAdmissible, "int |psi|^2/x^2 is not resolved at the inner edge of the grid");
    auto interp = std::make_shared<Interpolator>(psi);
    WeightPFT w = make_cs_weight([interp](const CVec& x) { return (*interp)(x); }, std::move(label));
    w.y_min = g.r_min();
    w.y_max = g.r_max();
    return w;
}

WeightPFT make_inversion_weight() {
    WeightPFT w;
    w.kind = WeightKind::Inversion;
    w.label = "inversion";
    w.distributional = true;
    return w;
}

WeightPFT make_custom_weight(OmegaHatFn fn, std::string label, double y_min, double y_max) {
    WeightPFT w;
    w.kind = WeightKind::Custom;
    w.label = std::move(label);
    w.fn = std::move(fn);
    w.y_min = y_min;
    w.y_max = y_max;
    return w;
}

cplx omega(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u) {
    if (w.kind == WeightKind::Inversion) return omega_inversion(beta, nu1, nu2, u);
    const PlaneRule rule = plane_rule(w.y_min, w.y_max, 64);
    const int nr = static_cast<int>(rule.r.size());
    std::vector<cplx> shells(nr);
    parallel_for(static_cast<std::size_t>(nr), [&](std::size_t j) {
        const double r = rule.r[j];
        cplx acc = 0.0;
        for (int k = 0; k < rule.n_theta; ++k) {
            const CVec y = CVec::from_polar(r, kTwoPi * k / rule.n_theta);
            acc += w.fn(u, -y) * std::pow(y.c1, nu1) * std::pow(y.c2, nu2);
        }
        shells[j] = acc * std::pow(r, -(beta + 2.0)) * (kTwoPi / rule.n_theta);
    });
    cplx total = 0.0;
    for (int j = 0; j < nr; ++j) total += rule.wr[j] * shells[j];
    // Integrand mass per unit log y at the two ends of the range.
    const double head = std::abs(shells.front()) * rule.r.front() * rule.r.front();
    const double tail = std::abs(shells.back()) * rule.r.back() * rule.r.back();
    double scale = 0.0;
    for (int j = 0; j < nr; ++j) scale = std::max(scale, std::abs(shells[j]) * rule.r[j] * rule.r[j]);
    if (std::max(head, tail) > 1e-9 * scale)
        throw Error(ErrorKind::Divergent, "Omega_(" + std::to_string(beta) + "," + std::to_string(nu1) + "," +
                                              std::to_string(nu2) + ") integrand does not decay at the range ends");
    return total;
}

std::array<cplx, 2> omega_grad(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u, double h) {
    std::array<cplx, 2> out{};
    for (int l = 0; l < 2; ++l) {
        const CVec e = l == 0 ? CVec{1.0, 0.0} : CVec{0.0, 1.0};
        auto central = [&](double step) {
            return (omega(w, beta, nu1, nu2, u + e * step) - omega(w, beta, nu1, nu2, u - e * step)) / (2.0 * step);
        };
        out[l] = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }
    return out;
}

cplx omega_laplacian(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u, double h) {
    const cplx mid = omega(w, beta, nu1, nu2, u);
    auto second = [&](double step) {
        cplx acc = 0.0;
        for (int l = 0; l < 2; ++l) {
            const CVec e = l == 0 ? CVec{step, 0.0} : CVec{0.0, step};
            acc += omega(w, beta, nu1, nu2, u + e) + omega(w, beta, nu1, nu2, u - e) - 2.0 * mid;
        }
        return acc / (step * step);
    };
    return (4.0 * second(0.5 * h) - second(h)) / 3.0;
}

OmegaTable omega_table(const WeightPFT& w) {
    const CVec one{1.0, 0.0};
    OmegaTable t{};
    t.omega0 = omega(w, 0.0, 0, 0, one);
    t.omega_m2 = omega(w, -2.0, 0, 0, one);
    t.c_M = kTwoPi * t.omega0.real();
    if (w.kind == WeightKind::Inversion) {
        // Omega_beta(u) = 2 pi u^{-(beta+4)/2}; odd-nu entries on the principal root.
        t.grad0 = {cplx(-4.0 * kPi), cplx(0.0)};
        t.lap0 = cplx(4.0 * 2.0 * kPi);
        t.omega_210 = cplx(kTwoPi);
        t.omega_201 = cplx(0.0);
        t.grad_210 = {cplx(-5.0 * kPi), cplx(0.0)};
        t.grad_201 = {cplx(0.0), cplx(kPi)};
        return t;
    }
    t.grad0 = omega_grad(w, 0.0, 0, 0, one);
    t.lap0 = omega_laplacian(w, 0.0, 0, 0, one);
    t.omega_210 = omega(w, 2.0, 1, 0, one);
    t.omega_201 = omega(w, 2.0, 0, 1, one);
    t.grad_210 = omega_grad(w, 2.0, 1, 0, one);
    t.grad_201 = omega_grad(w, 2.0, 0, 1, one);
    return t;
}

double c_M(const WeightPFT& w) { return kTwoPi * omega(w, 0.0, 0, 0, {1.0, 0.0}).real(); }

cplx unit_trace(const WeightPFT& w) { return omega(w, -2.0, 0, 0, {1.0, 0.0}) / kTwoPi; }

double symmetry_residual_pft(const WeightPFT& w, int n, unsigned seed) {
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "symmetry check needs point values");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logr(-1.5, 1.5), ang(0.0, kTwoPi), yr(0.05, 6.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const CVec u = CVec::from_polar(std::exp(logr(rng)), ang(rng));
        const CVec y = CVec::from_polar(yr(rng), ang(rng));
        const cplx lhs = w(u, y);
        const cplx rhs = std::pow(u.modulus(), -4.0) * std::conj(w(cinv(u), cmul(cinv(u), y)));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    return worst;
}

// ---------------------------------------------------------------- kernels

Field OperatorKernel::apply(const Field& phi) const {
    if (!phi.grid || !(phi.grid == grid || phi.grid->same_as(*grid)))
        throw Error(ErrorKind::GridMismatch, "kernel and field grids differ");
    const std::size_t N = n();
    std::vector<cplx> wphi(N);
    for (std::size_t j = 0; j < N; ++j) wphi[j] = grid->weight(j) * phi.v[j];
    Field out(grid);
    parallel_for(N, [&](std::size_t i) {
        cplx acc = 0.0;
        const cplx* row = &k[i * N];
        for (std::size_t j = 0; j < N; ++j) acc += row[j] * wphi[j];
        out.v[i] = acc;
    });
    return out;
}

cplx OperatorKernel::trace() const {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n(); ++i) acc += at(i, i) * grid->weight(i);
    return acc;
}

double OperatorKernel::hermiticity_residual() const {
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t j = 0; j < n(); ++j) {
            worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
            scale = std::max(scale, std::abs(at(i, j)));
        }
    return scale > 0.0 ? worst / scale : 0.0;
}

GridPtr kernel_grid() {
    static const GridPtr g = build_polar_grid(64, 32, 1e-2, 40.0);
    return g;
}

OperatorKernel m_kernel(const WeightPFT& w, GridPtr grid) {
    if (w.distributional)
        throw Error(ErrorKind::DistributionalWeight, "the inversion quantizer is the closed form 2I, not a sampled kernel");
    if (!grid) grid = kernel_grid();
    OperatorKernel K(grid);
    const std::size_t N = K.n();
    parallel_for(N, [&](std::size_t i) {
        const CVec x = grid->node(i);
        const double x2 = x.modulus2();
        for (std::size_t j = 0; j < N; ++j) {
            const CVec xp = grid->node(j);
            K.at(i, j) = (x2 / xp.modulus2()) * w(cdiv(x, xp), -x) / kTwoPi;
        }
    });
    return K;
}

KernelTrace::KernelTrace(const OperatorKernel& K) : grid_(K.grid) {
    const PolarGrid& g = *grid_;
    const int nt = g.n_theta();
    const int half = nt / 2;
    nm_ = 2 * half + 1;
    const std::size_t N = K.n();
    coef_.assign(N * g.n_r() * nm_, cplx(0.0));
    parallel_for(N, [&](std::size_t col) {
        std::vector<cplx> tw(nt);
        for (int m = -half; m <= half; ++m) {
            for (int k = 0; k < nt; ++k) tw[k] = std::polar(1.0 / nt, -m * g.theta(k));
            const double scale = (nt % 2 == 0 && std::abs(m) == half) ? 0.5 : 1.0;
            for (int j = 0; j < g.n_r(); ++j) {
                cplx acc = 0.0;
                for (int k = 0; k < nt; ++k) acc += K.at(static_cast<std::size_t>(j) * nt + k, col) * tw[k];
                coef_[(col * g.n_r() + j) * nm_ + (m + half)] = scale * acc;
            }
        }
    });
}

cplx KernelTrace::trace_U(const GroupElement& g) const {
    const PolarGrid& grid = *grid_;
    const double qm = g.q.modulus();
    const CVec qinv = cinv(g.q);
    const int n = grid.n_r();
    const int half = nm_ / 2;
    cplx total = 0.0;
    for (std::size_t col = 0; col < grid.size(); ++col) {
        const CVec x = grid.node(col);
        const CVec y = cmul(x, qinv);
        const double t = (std::log(y.modulus()) - grid.s(0)) / grid.hs();
        if (t < 0.0 || t > n - 1) continue;
        const int j0 = std::clamp(static_cast<int>(std::floor(t)) - 3, 0, n - 8);
        double L[8];
        for (int a = 0; a < 8; ++a) {
            double wl = 1.0;
            for (int b = 0; b < 8; ++b)
                if (b != a) wl *= (t - (j0 + b)) / static_cast<double>(a - b);
            L[a] = wl;
        }
        const double th = y.angle();
        const cplx step = std::polar(1.0, th);
        cplx e = std::polar(1.0, -half * th);
        cplx val = 0.0;
        for (int idx = 0; idx < nm_; ++idx) {
            cplx c = 0.0;
            for (int a = 0; a < 8; ++a) c += L[a] * coef_[(col * n + j0 + a) * nm_ + idx];
            val += c * e;
            e *= step;
        }
        total += grid.weight(col) * std::polar(1.0, dot(g.p, x)) * val / qm;
    }
    return total;
}

cplx KernelTrace::weight(const GroupElement& g) const { return std::conj(trace_U(g)) / g.q.modulus(); }

cplx weight_from_kernel(const OperatorKernel& K, const GroupElement& g) { return KernelTrace(K).weight(g); }

PlaneFn inversion_apply(PlaneFn phi) {
    return [phi](const CVec& x) { return phi(cinv(x)) / x.modulus2(); };
}

cplx inversion_trace_U(const GroupElement& g) {
    // Fixed points x = +-sqrt(q) of x -> q/x, each entering with weight 1/|2|^2.
    const CVec root = csqrt_sheets({g.q, 1});
    return 0.5 * std::cos(dot(g.p, root));
}

cplx inversion_weight_value(const GroupElement& g) {
    const CVec root = csqrt_sheets({g.q, 1});
    return std::polar(1.0 / g.q.modulus(), -dot(g.p, root));
}

double inversion_trace_regularized(double sigma, int n_s, int n_theta) {
    const double L = 20.0 * sigma;
    const double hs = 2.0 * L / (n_s - 1);
    const double ht = kTwoPi / n_theta;
    const double norm = 1.0 / (std::sqrt(kTwoPi) * sigma);
    double ds = 0.0;
    for (int a = 0; a < n_s; ++a) {
        const double s = -L + a * hs;
        ds += (a == 0 || a == n_s - 1 ? 0.5 : 1.0) * hs * norm * std::exp(-(2.0 * s) * (2.0 * s) / (2.0 * sigma * sigma));
    }
    double dt = 0.0;
    for (int k = 0; k < n_theta; ++k) {
        const double t = 2.0 * k * ht;
        double per = 0.0;
        for (int w = -3; w <= 3; ++w) {
            const double d = t - kTwoPi * w - kTwoPi;
            per += norm * std::exp(-d * d / (2.0 * sigma * sigma));
        }
        dt += ht * per;
    }
    return ds * dt;
}

}  // namespace simquant
