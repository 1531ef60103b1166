#include "simquant/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "simquant/errors.hpp"
#include "simquant/parallel.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

const bool gsl_quiet = [] {
    gsl_set_error_handler_off();
    return true;
}();

// Coefficients c_m, m in [-K, K], with the Nyquist term of an even grid split
// evenly between +K and -K so that real data keeps conjugate symmetry.
struct FullModes {
    int K = 0;
    std::vector<std::vector<cplx>> c;  // c[m + K][j]
};

FullModes full_modes(const Field& f) {
    const PolarGrid& g = *f.grid;
    const int nt = g.n_theta();
    FullModes fm;
    fm.K = nt / 2;
    const bool even = nt % 2 == 0;
    fm.c.assign(2 * fm.K + 1, std::vector<cplx>(g.n_r(), cplx(0.0)));
    std::vector<cplx> tw(nt);
    for (int m = -fm.K; m <= fm.K; ++m) {
        for (int k = 0; k < nt; ++k) tw[k] = std::polar(1.0 / nt, -m * g.theta(k));
        const double scale = (even && std::abs(m) == fm.K) ? 0.5 : 1.0;
        for (int j = 0; j < g.n_r(); ++j) {
            cplx acc = 0.0;
            const cplx* row = &f.v[static_cast<std::size_t>(j) * nt];
            for (int k = 0; k < nt; ++k) acc += row[k] * tw[k];
            fm.c[m + fm.K][j] = scale * acc;
        }
    }
    return fm;
}

// d/ds and d^2/ds^2 of a radial profile with the grid stencils.
void profile_derivs(const PolarGrid& g, const std::vector<cplx>& f, std::vector<cplx>* d1,
                    std::vector<cplx>* d2) {
    const int n = g.n_r();
    if (d1) d1->assign(n, 0.0);
    if (d2) d2->assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const int s0 = g.stencil_start(j);
        cplx a = 0.0, b = 0.0;
        for (int t = 0; t < 9; ++t) {
            a += g.d1(j)[t] * f[s0 + t];
            b += g.d2(j)[t] * f[s0 + t];
        }
        if (d1) (*d1)[j] = a;
        if (d2) (*d2)[j] = b;
    }
}

// Rebuilds a field from per-mode profiles indexed by m in [m_lo, m_lo + n).
Field from_profiles(const GridPtr& grid, int m_lo, const std::vector<std::vector<cplx>>& prof) {
    Field out(grid);
    const int nt = grid->n_theta();
    for (int k = 0; k < nt; ++k) {
        const double th = grid->theta(k);
        for (std::size_t idx = 0; idx < prof.size(); ++idx) {
            const cplx e = std::polar(1.0, (m_lo + static_cast<int>(idx)) * th);
            for (int j = 0; j < grid->n_r(); ++j)
                out.v[static_cast<std::size_t>(j) * nt + k] += prof[idx][j] * e;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- PolarGrid

PolarGrid::PolarGrid(int n_r, int n_theta, double r_min, double r_max)
    : n_r_(n_r), n_theta_(n_theta), r_min_(r_min), r_max_(r_max) {
    if (n_r < 4 || n_theta < 4) throw Error(ErrorKind::BadRange, "N_r and N_theta must be >= 4");
    if (!(r_min > 0.0) || !(r_max > r_min)) throw Error(ErrorKind::BadRange, "need 0 < r_min < r_max");
    s0_ = std::log(r_min);
    hs_ = (std::log(r_max) - s0_) / (n_r - 1);
    r_.resize(n_r);
    wr_.resize(n_r);
    for (int j = 0; j < n_r; ++j) r_[j] = std::exp(s0_ + j * hs_);
    r_.front() = r_min;
    r_.back() = r_max;

    std::vector<double> mult(n_r, 1.0);
    if (n_r >= 10) {
        const double ends[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
        for (int t = 0; t < 4; ++t) {
            mult[t] = ends[t];
            mult[n_r - 1 - t] = ends[t];
        }
    } else {
        mult.front() = mult.back() = 0.5;
    }
    for (int j = 0; j < n_r; ++j) wr_[j] = mult[j] * hs_ * r_[j] * r_[j];

    st0_.resize(n_r);
    d1_.resize(n_r);
    d2_.resize(n_r);
    const int width = std::min(9, n_r);
    for (int j = 0; j < n_r; ++j) {
        const int start = std::clamp(j - 4, 0, n_r - width);
        st0_[j] = start;
        std::vector<double> xs(width);
        for (int t = 0; t < width; ++t) xs[t] = (start + t - j) * hs_;
        const auto w1 = fd_weights(xs, 0.0, 1);
        const auto w2 = fd_weights(xs, 0.0, 2);
        d1_[j].fill(0.0);
        d2_[j].fill(0.0);
        for (int t = 0; t < width; ++t) {
            d1_[j][t] = w1[t];
            d2_[j][t] = w2[t];
        }
    }
}

double PolarGrid::theta(int k) const { return kTwoPi * k / n_theta_; }

double PolarGrid::angular_weight() const { return kTwoPi / n_theta_; }

CVec PolarGrid::node(std::size_t i) const {
    return CVec::from_polar(r_[i / n_theta_], theta(static_cast<int>(i % n_theta_)));
}

bool PolarGrid::same_as(const PolarGrid& o) const {
    return n_r_ == o.n_r_ && n_theta_ == o.n_theta_ && r_min_ == o.r_min_ && r_max_ == o.r_max_;
}

GridPtr build_polar_grid(int n_r, int n_theta, double r_min, double r_max) {
    return std::make_shared<const PolarGrid>(n_r, n_theta, r_min, r_max);
}

GridPtr default_grid() {
    static const GridPtr g = build_polar_grid(256, 64, 1.0e-4, 60.0);
    return g;
}

// ---------------------------------------------------------------- Field

Field::Field(GridPtr g, std::vector<cplx> values) : grid(std::move(g)), v(std::move(values)) {
    if (v.size() != grid->size()) throw Error(ErrorKind::GridMismatch, "value count != node count");
}

Field sample(GridPtr grid, const PlaneFn& f) {
    Field out(grid);
    parallel_for(grid->size(), [&](std::size_t i) { out.v[i] = f(grid->node(i)); });
    return out;
}

cplx integrate_plane(const Field& f) {
    const PolarGrid& g = *f.grid;
    cplx acc = 0.0;
    for (int j = 0; j < g.n_r(); ++j) {
        cplx shell = 0.0;
        const cplx* row = &f.v[static_cast<std::size_t>(j) * g.n_theta()];
        for (int k = 0; k < g.n_theta(); ++k) shell += row[k];
        acc += g.radial_weight(j) * shell;
    }
    return acc * g.angular_weight();
}

void require_same_grid(const Field& a, const Field& b) {
    if (!a.grid || !b.grid || !(a.grid == b.grid || a.grid->same_as(*b.grid)))
        throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

cplx inner(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field prod(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) prod.v[i] = std::conj(a.v[i]) * b.v[i];
    return integrate_plane(prod);
}

double norm2(const Field& f) { return inner(f, f).real(); }

double max_abs_diff(const Field& a, const Field& b) {
    require_same_grid(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

// ---------------------------------------------------------------- modes

ModeStack angular_decompose(const Field& f, int m_max) {
    const PolarGrid& g = *f.grid;
    const int nt = g.n_theta();
    if (m_max < 0) m_max = (nt - 1) / 2;
    if (nt < 2 * m_max + 1) throw Error(ErrorKind::BadRange, "N_theta < 2M+1");
    ModeStack ms;
    ms.grid = f.grid;
    ms.m_max = m_max;
    ms.modes.assign(2 * m_max + 1, std::vector<cplx>(g.n_r(), cplx(0.0)));
    std::vector<cplx> tw(nt);
    for (int m = -m_max; m <= m_max; ++m) {
        for (int k = 0; k < nt; ++k) tw[k] = std::polar(1.0 / nt, -m * g.theta(k));
        for (int j = 0; j < g.n_r(); ++j) {
            cplx acc = 0.0;
            const cplx* row = &f.v[static_cast<std::size_t>(j) * nt];
            for (int k = 0; k < nt; ++k) acc += row[k] * tw[k];
            ms.mode(m)[j] = acc;
        }
    }
    return ms;
}

Field reconstruct(const ModeStack& ms) { return from_profiles(ms.grid, -ms.m_max, ms.modes); }

// ---------------------------------------------------------------- interpolation

Interpolator::Interpolator(const Field& f, double log_pad) : grid_(f.grid), log_pad_(log_pad) {
    const FullModes fm = full_modes(f);
    nm_ = 2 * fm.K + 1;
    coef_.resize(static_cast<std::size_t>(grid_->n_r()) * nm_);
    for (int j = 0; j < grid_->n_r(); ++j)
        for (int idx = 0; idx < nm_; ++idx) coef_[static_cast<std::size_t>(j) * nm_ + idx] = fm.c[idx][j];
}

cplx Interpolator::operator()(const CVec& x) const {
    const PolarGrid& g = *grid_;
    ++calls_;
    const double r = x.modulus();
    const double s = r > 0.0 ? std::log(r) : -INFINITY;
    const double t = (s - g.s(0)) / g.hs();
    const int n = g.n_r();
    if (t < -1e-9 || t > n - 1 + 1e-9) {
        const double dist = t < 0 ? (g.s(0) - s) : (s - g.s(n - 1));
        if (dist > log_pad_)
            throw Error(ErrorKind::InterpolationOutOfRange, "point beyond annulus pad, r = " + std::to_string(r));
        ++outside_;
        return 0.0;
    }
    const int width = std::min(8, n);
    int j0 = static_cast<int>(std::floor(t)) - (width / 2 - 1);
    j0 = std::clamp(j0, 0, n - width);
    double L[8];
    for (int a = 0; a < width; ++a) {
        double w = 1.0;
        for (int b = 0; b < width; ++b)
            if (b != a) w *= (t - (j0 + b)) / static_cast<double>(a - b);
        L[a] = w;
    }
    const int K = nm_ / 2;
    const double th = x.angle();
    const cplx step = std::polar(1.0, th);
    cplx e = std::polar(1.0, -K * th);
    cplx acc = 0.0;
    for (int idx = 0; idx < nm_; ++idx) {
        cplx c = 0.0;
        for (int a = 0; a < width; ++a) c += L[a] * coef_[static_cast<std::size_t>(j0 + a) * nm_ + idx];
        acc += c * e;
        e *= step;
    }
    return acc;
}

double Interpolator::coverage_loss() const {
    return calls_ == 0 ? 0.0 : static_cast<double>(outside_) / static_cast<double>(calls_);
}

RadialProfile::RadialProfile(GridPtr grid, std::vector<cplx> values) : grid_(std::move(grid)), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_->n_r()) throw Error(ErrorKind::GridMismatch, "profile length != N_r");
}

RadialProfile RadialProfile::from_mode(const Field& f, int m) {
    const PolarGrid& g = *f.grid;
    const int nt = g.n_theta();
    std::vector<cplx> prof(g.n_r());
    std::vector<cplx> tw(nt);
    for (int k = 0; k < nt; ++k) tw[k] = std::polar(1.0 / nt, -m * g.theta(k));
    for (int j = 0; j < g.n_r(); ++j) {
        cplx acc = 0.0;
        for (int k = 0; k < nt; ++k) acc += f.v[static_cast<std::size_t>(j) * nt + k] * tw[k];
        prof[j] = acc;
    }
    return RadialProfile(f.grid, std::move(prof));
}

cplx RadialProfile::operator()(double r) const {
    const PolarGrid& g = *grid_;
    if (!(r >= g.r_min()) || r > g.r_max()) return 0.0;
    const int n = g.n_r();
    const double t = (std::log(r) - g.s(0)) / g.hs();
    const int j0 = std::clamp(static_cast<int>(std::floor(t)) - 3, 0, n - 8);
    cplx acc = 0.0;
    for (int a = 0; a < 8; ++a) {
        double w = 1.0;
        for (int b = 0; b < 8; ++b)
            if (b != a) w *= (t - (j0 + b)) / static_cast<double>(a - b);
        acc += w * v_[j0 + a];
    }
    return acc;
}

// ---------------------------------------------------------------- Fourier

namespace {

// Mode profiles resampled at arbitrary radii by 8-point Lagrange in log r.
// Below r_min a profile continues as (r/r_min)^|m|.
struct ProfileSampler {
    const PolarGrid* g;
    const FullModes* fm;

    void at(double r, cplx* out, const std::vector<int>& modes) const {
        const int n = g->n_r();
        const int K = fm->K;
        if (r >= g->r_max()) {
            for (int m : modes) out[m + K] = 0.0;
            return;
        }
        if (r <= g->r_min()) {
            const double ratio = r / g->r_min();
            for (int m : modes) out[m + K] = fm->c[m + K][0] * std::pow(ratio, std::abs(m));
            return;
        }
        const double t = (std::log(r) - g->s(0)) / g->hs();
        const int j0 = std::clamp(static_cast<int>(std::floor(t)) - 3, 0, n - 8);
        double L[8];
        for (int a = 0; a < 8; ++a) {
            double w = 1.0;
            for (int b = 0; b < 8; ++b)
                if (b != a) w *= (t - (j0 + b)) / static_cast<double>(a - b);
            L[a] = w;
        }
        for (int m : modes) {
            cplx acc = 0.0;
            for (int a = 0; a < 8; ++a) acc += L[a] * fm->c[m + K][j0 + a];
            out[m + K] = acc;
        }
    }
};

// Largest radius beyond which every mode profile is negligible.
double profile_support(const PolarGrid& g, const FullModes& fm) {
    double peak = 0.0;
    for (const auto& c : fm.c)
        for (const auto& v : c) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return g.r_min();
    for (int j = g.n_r() - 1; j >= 0; --j)
        for (const auto& c : fm.c)
            if (std::abs(c[j]) > 1e-17 * peak) return std::min(g.r_max(), g.r(std::min(j + 1, g.n_r() - 1)));
    return g.r_min();
}

}  // namespace

void radial_oscillatory_rule(double p, double r_lo, double R, std::vector<double>& x, std::vector<double>& w) {
    static const GaussRule unit = gauss_legendre(16, 0.0, 1.0);
    x.clear();
    w.clear();
    const double r_split = std::clamp(p > 0.0 ? 1.0 / p : R, r_lo, R);
    const double s_lo = std::log(r_lo), s_hi = std::log(r_split);
    const int ns = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / 0.5)));
    for (int b = 0; b < ns && s_hi > s_lo; ++b) {
        const double a = s_lo + (s_hi - s_lo) * b / ns;
        const double h = (s_hi - s_lo) / ns;
        for (std::size_t i = 0; i < unit.x.size(); ++i) {
            const double r = std::exp(a + h * unit.x[i]);
            x.push_back(r);
            w.push_back(h * unit.w[i] * r * r);
        }
    }
    if (R > r_split) {
        const double width = p > 0.0 ? std::min(0.5, 12.0 / p) : 0.5;
        const int nr = std::max(1, static_cast<int>(std::ceil((R - r_split) / width)));
        const double h = (R - r_split) / nr;
        for (int b = 0; b < nr; ++b) {
            const double a = r_split + h * b;
            for (std::size_t i = 0; i < unit.x.size(); ++i) {
                const double r = a + h * unit.x[i];
                x.push_back(r);
                w.push_back(h * unit.w[i] * r);
            }
        }
    }
}

Field fourier2d(const Field& f, int sign, GridPtr pgrid, bool strict) {
    if (!pgrid) pgrid = f.grid;
    const PolarGrid& g = *f.grid;
    if (strict) {
        const int edge = std::max(1, g.n_r() / 20);
        double tot = 0.0, out = 0.0;
        for (int j = 0; j < g.n_r(); ++j)
            for (int k = 0; k < g.n_theta(); ++k) {
                const double m = g.radial_weight(j) * std::norm(f.v[static_cast<std::size_t>(j) * g.n_theta() + k]);
                tot += m;
                if (j >= g.n_r() - edge || j < edge) out += m;
            }
        if (tot > 0.0 && out > 1e-6 * tot)
            throw Error(ErrorKind::AliasingWarning, "edge mass fraction " + std::to_string(out / tot));
    }
    const FullModes fm = full_modes(f);
    const int K = fm.K;
    const int nm = 2 * K + 1;
    const double R = profile_support(g, fm);
    const ProfileSampler sampler{&g, &fm};
    const PolarGrid& pg = *pgrid;
    // H[p_j][m + K] = int f_m(r) J_m(p r) r dr
    std::vector<std::vector<cplx>> H(pg.n_r(), std::vector<cplx>(nm, cplx(0.0)));
    std::vector<int> active;
    double peak = 0.0;
    for (const auto& c : fm.c)
        for (const auto& v : c) peak = std::max(peak, std::abs(v));
    int kmax = 0;
    for (int m = -K; m <= K; ++m) {
        double mx = 0.0;
        for (const auto& v : fm.c[m + K]) mx = std::max(mx, std::abs(v));
        if (mx > 1e-15 * peak) {
            active.push_back(m);
            kmax = std::max(kmax, std::abs(m));
        }
    }
    parallel_for(static_cast<std::size_t>(pg.n_r()), [&](std::size_t jp) {
        const double p = pg.r(static_cast<int>(jp));
        std::vector<double> xs, ws, J(kmax + 1);
        std::vector<cplx> prof(nm);
        radial_oscillatory_rule(p, 1e-3 * g.r_min(), R, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sampler.at(xs[i], prof.data(), active);
            bessel_j_range(kmax, p * xs[i], J.data());
            for (int m : active) {
                const int am = std::abs(m);
                const double jm = (m < 0 && (am % 2)) ? -J[am] : J[am];
                H[jp][m + K] += ws[i] * jm * prof[m + K];
            }
        }
    });
    Field out(pgrid);
    const int ntp = pg.n_theta();
    for (int k = 0; k < ntp; ++k) {
        const double psi = pg.theta(k);
        for (int m = -K; m <= K; ++m) {
            const cplx ph = std::polar(1.0, m * (psi + sign * 0.5 * kPi));
            for (int jp = 0; jp < pg.n_r(); ++jp)
                out.v[static_cast<std::size_t>(jp) * ntp + k] += ph * H[jp][m + K];
        }
    }
    return out;
}

// ---------------------------------------------------------------- derivatives

namespace {

Field del_pm(const Field& f, int dir) {
    const PolarGrid& g = *f.grid;
    const FullModes fm = full_modes(f);
    const int K = fm.K;
    std::vector<std::vector<cplx>> prof(2 * K + 1);
    std::vector<cplx> ds;
    for (int m = -K; m <= K; ++m) {
        const auto& c = fm.c[m + K];
        profile_derivs(g, c, &ds, nullptr);
        auto& out = prof[m + K];
        out.resize(g.n_r());
        for (int j = 0; j < g.n_r(); ++j) out[j] = (ds[j] - dir * static_cast<double>(m) * c[j]) / g.r(j);
    }
    return from_profiles(f.grid, -K + dir, prof);
}

}  // namespace

Field del_plus(const Field& f) { return del_pm(f, +1); }

Field del_minus(const Field& f) { return del_pm(f, -1); }

Field neg_laplacian(const Field& f) {
    const PolarGrid& g = *f.grid;
    const FullModes fm = full_modes(f);
    const int K = fm.K;
    std::vector<std::vector<cplx>> prof(2 * K + 1);
    std::vector<cplx> dss;
    for (int m = -K; m <= K; ++m) {
        const auto& c = fm.c[m + K];
        profile_derivs(g, c, nullptr, &dss);
        auto& out = prof[m + K];
        out.resize(g.n_r());
        for (int j = 0; j < g.n_r(); ++j)
            out[j] = -(dss[j] - static_cast<double>(m) * m * c[j]) / (g.r(j) * g.r(j));
    }
    return from_profiles(f.grid, -K, prof);
}

Field apply_P(const Field& f, int axis) {
    const Field a = del_plus(f);
    const Field b = del_minus(f);
    Field out(f.grid);
    const cplx I(0.0, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (axis == 1)
            out.v[i] = -I * 0.5 * (a.v[i] + b.v[i]);
        else
            out.v[i] = -0.5 * (a.v[i] - b.v[i]);
    }
    return out;
}

// ---------------------------------------------------------------- special functions

double laguerre(int n, double alpha, double x) {
    if (n < 0) throw Error(ErrorKind::DomainError, "Laguerre degree < 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0, l = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

void laguerre_all(int n_max, double alpha, double x, double* out) {
    out[0] = 1.0;
    if (n_max == 0) return;
    out[1] = 1.0 + alpha - x;
    for (int k = 1; k < n_max; ++k)
        out[k + 1] = ((2.0 * k + 1.0 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0);
}

double bessel_j(int nu, double x) {
    const int an = std::abs(nu);
    const double ax = std::abs(x);
    double v;
    if (an == 0)
        v = gsl_sf_bessel_J0(ax);
    else if (an == 1)
        v = gsl_sf_bessel_J1(ax);
    else
        v = std::cyl_bessel_j(static_cast<double>(an), ax);
    if (nu < 0 && (an % 2)) v = -v;
    if (x < 0 && (an % 2)) v = -v;
    return v;
}

void bessel_j_range(int n_max, double x, double* out) {
    const double ax = std::abs(x);
    if (ax == 0.0) {
        out[0] = 1.0;
        for (int n = 1; n <= n_max; ++n) out[n] = 0.0;
        return;
    }
    if (ax > n_max) {
        // Upward recurrence is stable for n < x.
        out[0] = gsl_sf_bessel_J0(ax);
        if (n_max >= 1) out[1] = gsl_sf_bessel_J1(ax);
        for (int n = 1; n < n_max; ++n) out[n + 1] = (2.0 * n / ax) * out[n] - out[n - 1];
    } else if (gsl_sf_bessel_Jn_array(0, n_max, ax, out) != GSL_SUCCESS) {
        for (int n = 0; n <= n_max; ++n) out[n] = std::cyl_bessel_j(static_cast<double>(n), ax);
    }
    if (x < 0)
        for (int n = 1; n <= n_max; n += 2) out[n] = -out[n];
}

double gamma_fn(double x) {
    if (x <= 0.0 && std::floor(x) == x) throw Error(ErrorKind::DomainError, "Gamma pole");
    return std::tgamma(x);
}

const GaussRule& gauss_laguerre(int n, double alpha) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    gsl_integration_fixed_workspace* w =
        gsl_integration_fixed_alloc(gsl_integration_fixed_laguerre, static_cast<size_t>(n), 0.0, 1.0, alpha, 0.0);
    if (!w) throw Error(ErrorKind::QuadratureNotConverged, "Gauss-Laguerre rule allocation failed");
    GaussRule rule;
    const double* xs = gsl_integration_fixed_nodes(w);
    const double* ws = gsl_integration_fixed_weights(w);
    rule.x.assign(xs, xs + n);
    rule.w.assign(ws, ws + n);
    gsl_integration_fixed_free(w);
    return cache.emplace(key, std::move(rule)).first->second;
}

GaussRule gauss_legendre(int n, double a, double b) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &rule.x[i], &rule.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return rule;
}

std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int order) {
    const int n = static_cast<int>(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

}  // namespace simquant
