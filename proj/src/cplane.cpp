#include "simquant/cplane.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "simquant/errors.hpp"

namespace simquant {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double canonical_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

CVec CVec::from_polar(double r, double theta) {
    return {r * std::cos(theta), r * std::sin(theta)};
}

double CVec::modulus() const { return std::hypot(c1, c2); }

double CVec::angle() const { return canonical_angle(std::atan2(c2, c1)); }

CVec cmul(const CVec& a, const CVec& b) {
    return {a.c1 * b.c1 - a.c2 * b.c2, a.c1 * b.c2 + a.c2 * b.c1};
}

CVec cinv(const CVec& a) {
    const double m2 = a.modulus2();
    if (m2 == 0.0) throw Error(ErrorKind::ZeroModulus, "cinv at the origin");
    return {a.c1 / m2, -a.c2 / m2};
}

CVec cconj(const CVec& a) { return {a.c1, -a.c2}; }

CVec cdiv(const CVec& a, const CVec& b) { return cmul(a, cinv(b)); }

double dot(const CVec& a, const CVec& b) { return a.c1 * b.c1 + a.c2 * b.c2; }

double cross(const CVec& a, const CVec& b) { return a.c1 * b.c2 - a.c2 * b.c1; }

CVec csqrt_sheets(const SheetedPoint& q) {
    const double r = q.base.modulus();
    if (r == 0.0) throw Error(ErrorKind::ZeroModulus, "square root at the origin");
    const CVec root = CVec::from_polar(std::sqrt(r), 0.5 * q.base.angle());
    return q.sheet == 2 ? -root : root;
}

cplx smeared_delta_pair(const CVec& q, const PlaneFn& phi) {
    const CVec rp = csqrt_sheets({q, 1});
    const CVec rm = csqrt_sheets({q, 2});
    return 0.5 * (phi(rp) + phi(rm));
}

NascentDeltaResult nascent_delta_pair(const CVec& q, const PlaneFn& phi, double eps0, int n_r,
                                      int n_theta) {
    if (q.modulus() == 0.0) throw Error(ErrorKind::ZeroModulus, "nascent delta at q = 0");
    NascentDeltaResult res{};
    const double s0 = 0.5 * std::log(q.modulus());
    const double half = 2.5;
    const double hs = 2.0 * half / (n_r - 1);
    const double ht = kTwoPi / n_theta;

    // Sample phi once; reuse across eps.
    std::vector<cplx> fvals(static_cast<size_t>(n_r) * n_theta);
    std::vector<CVec> fvec(static_cast<size_t>(n_r) * n_theta);
    std::vector<double> meas(static_cast<size_t>(n_r) * n_theta);
    for (int j = 0; j < n_r; ++j) {
        const double s = s0 - half + j * hs;
        const double r = std::exp(s);
        const double wr = (j == 0 || j == n_r - 1 ? 0.5 : 1.0) * hs * r * r;
        for (int k = 0; k < n_theta; ++k) {
            const CVec x = CVec::from_polar(r, k * ht);
            const size_t i = static_cast<size_t>(j) * n_theta + k;
            fvals[i] = phi(x);
            fvec[i] = x - cdiv(q, x);
            meas[i] = wr * ht;
        }
    }
    for (int e = 0; e < 3; ++e) {
        const double eps = eps0 / (1 << e);
        cplx acc = 0.0;
        const double norm = 1.0 / (kTwoPi * eps);
        for (size_t i = 0; i < fvals.size(); ++i) {
            const double g = norm * std::exp(-fvec[i].modulus2() / (2.0 * eps));
            acc += meas[i] * g * fvals[i];
        }
        res.eps[e] = eps;
        res.values[e] = acc;
    }
    res.extrapolated = (8.0 * res.values[2] - 6.0 * res.values[1] + res.values[0]) / 3.0;
    return res;
}

}  // namespace simquant
