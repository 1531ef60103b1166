#include "simquant/acs.hpp"

#include <cmath>
#include <numbers>

#include "simquant/errors.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// int_0^{2 pi} cos^a sin^b dtheta.
double angular_moment(int a, int b) {
    if (a % 2 != 0 || b % 2 != 0) return 0.0;
    return 2.0 * std::exp(std::lgamma(0.5 * (a + 1)) + std::lgamma(0.5 * (b + 1)) - std::lgamma(0.5 * (a + b + 2)));
}

// int ds g(e^s) over s in [s_lo, s_hi] on 16-node Gauss-Legendre panels of width 0.5.
template <class G>
double log_radial(const G& g, double s_lo, double s_hi) {
    const int panels = static_cast<int>(std::ceil((s_hi - s_lo) / 0.5));
    const double h = (s_hi - s_lo) / panels;
    const GaussRule unit = gauss_legendre(16, 0.0, 1.0);
    double acc = 0.0;
    for (int k = 0; k < panels; ++k)
        for (std::size_t i = 0; i < unit.x.size(); ++i) acc += h * unit.w[i] * g(std::exp(s_lo + h * (k + unit.x[i])));
    return acc;
}

// Lower end in s where r^power drops below 1e-18.
double s_floor(double power) { return std::log(1e-18) / std::max(power, 1e-3); }

constexpr double kRadialTop = 120.0;

}  // namespace

Fiducial make_fiducial(double alpha) {
    if (!(alpha > 2.0)) throw Error(ErrorKind::AlphaTooSmall, "fiducial requires alpha > 2, got " + std::to_string(alpha));
    Fiducial f;
    f.alpha = alpha;
    f.norm_const = 1.0 / (kTwoPi * std::tgamma(alpha + 1.0));
    const double sqrtN = std::sqrt(f.norm_const);
    const double a = 0.5 * (alpha - 1.0);
    f.radial = [sqrtN, a](double r) { return r > 0.0 ? sqrtN * std::exp(-0.5 * r) * std::pow(r, a) : 0.0; };
    f.radial_deriv = [sqrtN, a](double r) {
        return r > 0.0 ? sqrtN * std::exp(-0.5 * r) * std::pow(r, a) * (a / r - 0.5) : 0.0;
    };
    auto radial = f.radial;
    f.fn = [radial](const CVec& x) { return cplx(radial(x.modulus())); };
    f.field = sample(default_grid(), f.fn);
    return f;
}

double c_gamma(double alpha, double beta) { return std::exp(std::lgamma(alpha - beta - 1.0) - std::lgamma(alpha + 1.0)); }

double c_constant(const Fiducial& psi, double beta, int nu1, int nu2) {
    const double power = psi.alpha - 1.0 + nu1 + nu2 - beta;  // small-r behaviour of the s-integrand
    if (!(power > 0.0))
        throw Error(ErrorKind::Divergent, "c_(" + std::to_string(beta) + "," + std::to_string(nu1) + "," +
                                              std::to_string(nu2) + ") diverges at the origin");
    const double ang = angular_moment(nu1, nu2);
    if (ang == 0.0) return 0.0;
    const double e = nu1 + nu2 - beta;
    auto g = [&](double r) {
        const double v = psi.radial(r);
        return std::pow(r, e) * v * v;
    };
    return ang * log_radial(g, s_floor(power), std::log(kRadialTop + 4.0 * std::abs(e)));
}

double p2_expectation(const Fiducial& psi) {
    auto g = [&](double r) {
        const double d = psi.radial_deriv(r);
        return r * r * d * d;
    };
    return kTwoPi * log_radial(g, s_floor(psi.alpha - 1.0), std::log(kRadialTop));
}

double kinetic_constant(const Fiducial& psi) { return kTwoPi * p2_expectation(psi); }

double gamma_squared(const Fiducial& psi) { return 2.0 * p2_expectation(psi); }

AcsSymbol acs_lower_symbol(const Fiducial& psi, const ObservableSpec& spec) {
    using K = ObservableSpec::Kind;
    AcsSymbol s;
    s.name = spec.text;
    switch (spec.kind) {
        case K::One:
            s.eval = [](const CVec&, const CVec&) { return 1.0; };
            return s;
        case K::PowerQ: {
            const double b = spec.beta;
            s.coefficient = c_constant(psi, b) * c_constant(psi, -b - 2.0) / c_constant(psi, 0.0);
            const double c = s.coefficient;
            s.eval = [c, b](const CVec& q, const CVec&) { return c * std::pow(q.modulus(), b); };
            return s;
        }
        case K::Momentum: {
            const int axis = spec.axis;
            s.eval = [axis](const CVec&, const CVec& p) { return axis == 1 ? p.c1 : p.c2; };
            return s;
        }
        case K::KineticP2: {
            s.inverse_square = gamma_squared(psi);
            const double g2 = s.inverse_square;
            s.eval = [g2](const CVec& q, const CVec& p) { return p.modulus2() + g2 / q.modulus2(); };
            return s;
        }
        default:
            throw Error(ErrorKind::BadRange, "no ACS lower-symbol shortcut for '" + spec.text + "'");
    }
}

std::array<cplx, 2> inverse_q_p_expectation(const Fiducial& psi) {
    const Field& f = psi.field;
    const Field p1 = apply_P(f, 1), p2 = apply_P(f, 2);
    Field o1(f.grid), o2(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const CVec x = f.grid->node(i);
        const double r2 = x.modulus2();
        o1.v[i] = (x.c1 * p1.v[i] + x.c2 * p2.v[i]) / r2;
        o2.v[i] = (x.c1 * p2.v[i] - x.c2 * p1.v[i]) / r2;
    }
    return {inner(o1, f), inner(o2, f)};
}

MomentIdentities moment_identities(const Fiducial& psi) {
    const WeightPFT w = make_cs_weight(psi.fn);
    MomentIdentities b{};
    b.omega1 = omega(w, 0.0, 0, 0, e1).real();
    const auto g = omega_grad(w, 0.0, 0, 0, e1);
    b.grad = {g[0].real(), g[1].real()};
    b.lap = omega_laplacian(w, 0.0, 0, 0, e1).real();
    b.p2 = p2_expectation(psi);
    b.inv_q_p = inverse_q_p_expectation(psi);
    const cplx I{0.0, 1.0};
    const cplx r2a = b.grad[0] + 2.0 * b.omega1 + I * kTwoPi * b.inv_q_p[0];
    const cplx r2b = b.grad[1] + I * kTwoPi * b.inv_q_p[1];
    b.gradient = std::sqrt(std::norm(r2a) + std::norm(r2b));
    b.laplacian = std::abs(b.lap - 4.0 * b.omega1 - 8.0 * I * kPi * b.inv_q_p[0] + kTwoPi * b.p2);
    b.log_gradient = std::hypot(2.0 + b.grad[0] / b.omega1, b.grad[1] / b.omega1);
    b.kinetic_sum = std::abs(4.0 + 4.0 * b.grad[0] / b.omega1 + b.lap / b.omega1 + kTwoPi * b.p2);
    return b;
}

CTable fubini_study(const Fiducial& psi) {
    CTable t;
    t.alpha = psi.alpha;
    for (double beta : {-3.0, -2.0, -1.0, 0.0, 1.0})
        if (beta < psi.alpha - 1.0) t.c_beta.emplace_back(beta, c_constant(psi, beta));
    t.c_m2_10 = c_constant(psi, -2.0, 1, 0);
    t.c_m2_01 = c_constant(psi, -2.0, 0, 1);
    if (std::abs(t.c_m2_01) > 1e-8)
        throw Error(ErrorKind::ChoiceViolated, "c_(-2,0,1) = " + std::to_string(t.c_m2_01));
    t.p2 = p2_expectation(psi);
    t.gamma2 = 2.0 * t.p2;
    t.K = kTwoPi * t.p2;
    const double top = std::log(kRadialTop);
    const double lo = s_floor(psi.alpha - 1.0);
    // y.grad[y psi] = r (r psi)'; y x grad[y psi] = d/dtheta[r psi] vanishes for a radial psi.
    auto radial_part = [&](double r) {
        const double v = psi.radial(r) + r * psi.radial_deriv(r);
        return r * r * v * v;
    };
    const double radial_dilation = log_radial(radial_part, lo, top);
    const double angular_derivative = 0.0;
    t.A = angular_moment(0, 0) * radial_dilation;
    t.B = angular_derivative;
    t.C = angular_derivative;
    auto second = [&](double r) {
        const double v = psi.radial(r);
        return r * r * r * r * v * v;
    };
    const double m2 = log_radial(second, lo, top);
    t.D = angular_moment(2, 0) * m2;
    t.E = angular_moment(0, 2) * m2;
    t.F = angular_moment(1, 1) * m2;
    return t;
}

Eigen::Matrix4d fubini_study_metric(const CTable& t, const CVec& q) {
    const double q1 = q.c1, q2 = q.c2;
    const double q4 = q.modulus2() * q.modulus2();
    const double A2 = t.A * t.A, B2 = t.B * t.B, E2 = t.E * t.E, F2 = t.F * t.F, c2 = t.c_m2_01 * t.c_m2_01;
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 0) = (A2 * q1 * q1 + B2 * q2 * q2) / q4;
    g(1, 1) = (B2 * q1 * q1 + A2 * q2 * q2) / q4;
    g(0, 1) = g(1, 0) = ((A2 - B2) * q1 * q2 + t.C * (q1 * q1 - q2 * q2)) / q4;
    g(2, 2) = (E2 - c2) * q1 * q1 + F2 * q2 * q2;
    g(3, 3) = F2 * q1 * q1 + (E2 - c2) * q2 * q2;
    g(2, 3) = g(3, 2) = (E2 - F2 - c2) * q1 * q2 + t.G * (q1 * q1 - q2 * q2);
    return g;
}

}  // namespace simquant
