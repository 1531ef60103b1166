#include "simquant/sim2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "simquant/errors.hpp"

namespace simquant {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2) {
    return {cmul(g1.q, g2.q), cdiv(g2.p, cconj(g1.q)) + g1.p};
}

GroupElement inverse(const GroupElement& g) {
    return {cinv(g.q), -cmul(cconj(g.q), g.p)};
}

double group_distance(const GroupElement& a, const GroupElement& b) {
    return std::max((a.q - b.q).modulus(), (a.p - b.p).modulus());
}

PlaneFn uir_fn(const GroupElement& g, PlaneFn phi) {
    const double qm = g.q.modulus();
    if (qm == 0.0) throw Error(ErrorKind::ZeroModulus, "U(q,p) with q = 0");
    const CVec qinv = cinv(g.q);
    return [=](const CVec& x) {
        return std::polar(1.0 / qm, dot(g.p, x)) * phi(cmul(x, qinv));
    };
}

PlaneFn duflo_moore_fn(int power, PlaneFn phi) {
    return [=](const CVec& x) { return std::pow(kTwoPi / x.modulus(), power) * phi(x); };
}

Field uir_apply(const GroupElement& g, const Field& phi, double* coverage_loss) {
    auto interp = std::make_shared<Interpolator>(phi);
    Field out = sample(phi.grid, uir_fn(g, [interp](const CVec& y) { return (*interp)(y); }));
    if (coverage_loss) *coverage_loss = interp->coverage_loss();
    return out;
}

Field duflo_moore_apply(const Field& phi, int power) {
    if (power != 1 && power != -1) throw Error(ErrorKind::BadRange, "Duflo-Moore power must be +1 or -1");
    Field out(phi.grid);
    const int nt = phi.grid->n_theta();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double x = phi.grid->r(static_cast<int>(i / nt));
        out.v[i] = std::pow(kTwoPi / x, power) * phi.v[i];
    }
    return out;
}

double check_dm_commutation(const GroupElement& g, const Field& phi) {
    auto interp = std::make_shared<Interpolator>(phi);
    const PlaneFn f = [interp](const CVec& y) { return (*interp)(y); };
    const PlaneFn lhs = uir_fn(g, duflo_moore_fn(-1, f));
    const PlaneFn u_f = uir_fn(g, f);
    const double qm = g.q.modulus();
    const PolarGrid& grid = *phi.grid;
    const int edge = std::max(1, grid.n_r() / 16);
    double worst = 0.0;
    for (int j = edge; j < grid.n_r() - edge; ++j)
        for (int k = 0; k < grid.n_theta(); ++k) {
            const CVec x = CVec::from_polar(grid.r(j), grid.theta(k));
            const cplx rhs = (x.modulus() / kTwoPi) * u_f(x) / qm;
            worst = std::max(worst, std::abs(lhs(x) - rhs));
        }
    return worst;
}

double haar_invariance_residual(const GroupElement& g0, const PhaseFn& F) {
    // Polar in q (log radius, angle), Cartesian in p; all trapezoid on
    // periodic or rapidly decaying integrands.
    const int ns = 96, nth = 32, np = 40;
    const double s_lo = -9.0, s_hi = 9.0, p_half = 10.0;
    const double hs = (s_hi - s_lo) / (ns - 1), ht = kTwoPi / nth, hp = 2.0 * p_half / (np - 1);
    double plain = 0.0, moved = 0.0;
    for (int a = 0; a < ns; ++a) {
        const double r = std::exp(s_lo + a * hs);
        const double wq = hs * ht * r * r;
        for (int b = 0; b < nth; ++b) {
            const CVec q = CVec::from_polar(r, b * ht);
            double row_plain = 0.0, row_moved = 0.0;
            for (int c = 0; c < np; ++c)
                for (int d = 0; d < np; ++d) {
                    const GroupElement g{q, {-p_half + c * hp, -p_half + d * hp}};
                    row_plain += F(g);
                    row_moved += F(compose(g0, g));
                }
            plain += wq * hp * hp * row_plain;
            moved += wq * hp * hp * row_moved;
        }
    }
    return std::abs(moved - plain) / std::abs(plain);
}

}  // namespace simquant
