#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "simquant/cplane.hpp"

namespace simquant {

// Log-spaced radial nodes times uniform angular nodes. Node i = j * n_theta + k.
class PolarGrid {
public:
    PolarGrid(int n_r, int n_theta, double r_min, double r_max);

    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    double hs() const { return hs_; }
    double r(int j) const { return r_[j]; }
    double s(int j) const { return s0_ + j * hs_; }
    double theta(int k) const;
    // Weight of int_0^inf . r dr at radial node j.
    double radial_weight(int j) const { return wr_[j]; }
    double angular_weight() const;
    double weight(std::size_t i) const { return wr_[i / n_theta_] * angular_weight(); }
    CVec node(std::size_t i) const;
    int radial_index(std::size_t i) const { return static_cast<int>(i / n_theta_); }
    int angular_index(std::size_t i) const { return static_cast<int>(i % n_theta_); }

    // Finite-difference stencils in s = log r (9 points, 8th order in the interior).
    int stencil_start(int j) const { return st0_[j]; }
    const std::array<double, 9>& d1(int j) const { return d1_[j]; }
    const std::array<double, 9>& d2(int j) const { return d2_[j]; }

    bool same_as(const PolarGrid& o) const;

private:
    int n_r_, n_theta_;
    double r_min_, r_max_, s0_, hs_;
    std::vector<double> r_, wr_;
    std::vector<int> st0_;
    std::vector<std::array<double, 9>> d1_, d2_;
};

using GridPtr = std::shared_ptr<const PolarGrid>;

GridPtr build_polar_grid(int n_r, int n_theta, double r_min, double r_max);
// N_r = 256 on [1e-4, 60], N_theta = 64.
GridPtr default_grid();

// Complex samples of a function on R^2_* at the nodes of a grid.
struct Field {
    GridPtr grid;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(GridPtr g) : grid(std::move(g)), v(grid->size(), cplx(0.0)) {}
    Field(GridPtr g, std::vector<cplx> values);

    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
};

Field sample(GridPtr grid, const PlaneFn& f);
cplx integrate_plane(const Field& f);
cplx inner(const Field& a, const Field& b);  // <a|b>, antilinear in a
double norm2(const Field& f);
double max_abs_diff(const Field& a, const Field& b);
void require_same_grid(const Field& a, const Field& b);

// Angular Fourier modes per radial shell: f(x) = sum_m f_m(r) e^{i m theta}.
struct ModeStack {
    GridPtr grid;
    int m_max = 0;
    std::vector<std::vector<cplx>> modes;  // modes[m + m_max][j]

    const std::vector<cplx>& mode(int m) const { return modes[m + m_max]; }
    std::vector<cplx>& mode(int m) { return modes[m + m_max]; }
};

// Requires n_theta >= 2 m_max + 1; m_max < 0 selects every resolvable mode.
ModeStack angular_decompose(const Field& f, int m_max = -1);
Field reconstruct(const ModeStack& ms);

// Evaluation of a field off the grid: trigonometric in theta, 8-point Lagrange
// in log r. Outside [r_min, r_max] the value is zero unless the point lies more
// than a factor exp(log_pad) beyond the annulus, which throws.
class Interpolator {
public:
    explicit Interpolator(const Field& f, double log_pad = std::log(1.0e3));
    cplx operator()(const CVec& x) const;
    // Fraction of evaluations that fell outside the annulus (zero-extended).
    double coverage_loss() const;

private:
    GridPtr grid_;
    double log_pad_;
    int nm_;
    std::vector<cplx> coef_;  // coef_[j * nm_ + (m + nm_/2)]
    mutable std::size_t calls_ = 0, outside_ = 0;
};

// One radial profile on the nodes of a grid, evaluated off-grid by 8-point
// Lagrange interpolation in log r and zero outside [r_min, r_max].
class RadialProfile {
public:
    RadialProfile(GridPtr grid, std::vector<cplx> values);
    // Mode m of a field.
    static RadialProfile from_mode(const Field& f, int m);
    cplx operator()(double r) const;
    const std::vector<cplx>& values() const { return v_; }

private:
    GridPtr grid_;
    std::vector<cplx> v_;
};

// 2-D Fourier transform (1/2pi) int d^2x e^{sign i p.x} f(x), computed as a
// Hankel transform per angular mode and returned on the momentum grid pgrid.
// With strict set, throws AliasingWarning when the outer radial shells carry
// more than 1e-6 of the mass.
Field fourier2d(const Field& f, int sign, GridPtr pgrid = nullptr, bool strict = false);

// Nodes and weights (weights include the factor r) for int_{r_lo}^{R} g(r) r dr
// when g carries a factor J_m(p r): Gauss-Legendre panels in log r below 1/p,
// then panels in r no wider than 12/p (16 nodes each).
void radial_oscillatory_rule(double p, double r_lo, double R, std::vector<double>& x,
                             std::vector<double>& w);

// Spatial derivatives per angular mode using the log-radial stencils.
Field del_plus(const Field& f);   // (d/dx1 + i d/dx2) f
Field del_minus(const Field& f);  // (d/dx1 - i d/dx2) f
Field neg_laplacian(const Field& f);
Field apply_P(const Field& f, int axis);  // -i d/dx_axis, axis in {1, 2}

// Special functions.
double laguerre(int n, double alpha, double x);
void laguerre_all(int n_max, double alpha, double x, double* out);
double bessel_j(int nu, double x);
// J_0..J_{n_max}(x) into out.
void bessel_j_range(int n_max, double x, double* out);
double gamma_fn(double x);

struct GaussRule {
    std::vector<double> x, w;
};
// Nodes and weights for int_0^inf t^alpha e^{-t} g(t) dt; cached.
const GaussRule& gauss_laguerre(int n, double alpha);
// Nodes and weights on [a, b]; cached for the unit interval.
GaussRule gauss_legendre(int n, double a, double b);

// Fornberg weights for the derivative of order `order` at x0 from nodes xs.
std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int order);

}  // namespace simquant
