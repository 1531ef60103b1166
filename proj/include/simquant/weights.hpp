#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "simquant/numerics.hpp"
#include "simquant/sim2.hpp"

namespace simquant {

enum class WeightKind { CoherentState, Inversion, Custom };

// omega_hat(u, y): Fourier transform of the weight in its momentum variable.
using OmegaHatFn = std::function<cplx(const CVec& u, const CVec& y)>;

struct WeightPFT {
    WeightKind kind = WeightKind::Custom;
    std::string label;
    bool distributional = false;
    OmegaHatFn fn;    // empty for distributional weights
    PlaneFn fiducial;  // coherent-state weights only
    // Radial range outside which omega_hat(u, -y) is taken to vanish in y.
    double y_min = 1e-12, y_max = 1e3;

    // Throws DistributionalWeight when no pointwise values exist.
    cplx operator()(const CVec& u, const CVec& y) const;
};

// omega_hat(u, v) = 2 pi u^-2 psi(-v) conj(psi(-v/u)).
WeightPFT make_cs_weight(PlaneFn psi, std::string label = "cs");
// Grid-backed fiducial read through its interpolant; NotAdmissible when
// int |psi|^2 / x^2 is dominated by the innermost shells.
WeightPFT make_cs_weight(const Field& psi, std::string label = "cs-grid");
// omega_hat(u, y) = (2 pi / u) delta(y + sqrt u), handled analytically.
WeightPFT make_inversion_weight();
WeightPFT make_custom_weight(OmegaHatFn fn, std::string label, double y_min = 1e-12, double y_max = 1e3);

// Omega_{(beta, nu1, nu2)}(u) = int d^2y y^{-(beta+2)} omega_hat(u, -y) y1^nu1 y2^nu2.
// Divergent when the integrand does not die out at the ends of the y range.
cplx omega(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u);
// Central differences in u (step h, one Richardson step).
std::array<cplx, 2> omega_grad(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u, double h = 1e-4);
cplx omega_laplacian(const WeightPFT& w, double beta, int nu1, int nu2, const CVec& u, double h = 1e-4);

struct OmegaTable {
    cplx omega0;                      // Omega_0(1)
    std::array<cplx, 2> grad0;        // grad Omega_0 at 1
    cplx lap0;                        // Laplacian of Omega_0 at 1
    cplx omega_m2;                    // Omega_{-2}(1)
    cplx omega_210, omega_201;        // Omega_{(2,1,0)}(1), Omega_{(2,0,1)}(1)
    std::array<cplx, 2> grad_210, grad_201;
    double c_M;                       // 2 pi Omega_0(1)
};
OmegaTable omega_table(const WeightPFT& w);
double c_M(const WeightPFT& w);

// (1/2 pi) Omega_{-2}(1), equal to 1 for a unit-trace weight.
cplx unit_trace(const WeightPFT& w);

// Max over n random (u, y) of |omega_hat(u,y) - u^-4 conj(omega_hat(1/u, y/u))|,
// the form the symmetry condition takes after the momentum transform.
double symmetry_residual_pft(const WeightPFT& w, int n, unsigned seed);

// Dense kernel K(x_i, x'_j) with (A phi)(x_i) = sum_j K_ij w_j phi(x'_j).
struct OperatorKernel {
    GridPtr grid;
    std::vector<cplx> k;  // row-major, size N x N

    OperatorKernel() = default;
    explicit OperatorKernel(GridPtr g) : grid(std::move(g)), k(grid->size() * grid->size(), cplx(0.0)) {}
    std::size_t n() const { return grid->size(); }
    cplx& at(std::size_t i, std::size_t j) { return k[i * n() + j]; }
    const cplx& at(std::size_t i, std::size_t j) const { return k[i * n() + j]; }

    Field apply(const Field& phi) const;
    cplx trace() const;
    double hermiticity_residual() const;
};

// Default coarse grid for dense kernels.
GridPtr kernel_grid();

// M(x, x') = (1/2 pi)(x^2 / x'^2) omega_hat(x / x', -x).
OperatorKernel m_kernel(const WeightPFT& w, GridPtr grid = nullptr);

// varpi(q, p) = (1/q) conj Tr(U(q,p) M), with the trace read off the kernel
// through interpolation in its first argument.
class KernelTrace {
public:
    explicit KernelTrace(const OperatorKernel& K);
    cplx trace_U(const GroupElement& g) const;  // Tr(U(g) M)
    cplx weight(const GroupElement& g) const;   // (1/q) conj Tr(U(g) M)

private:
    GridPtr grid_;
    int nm_;
    std::vector<cplx> coef_;  // [column][radial row][mode]
};
cplx weight_from_kernel(const OperatorKernel& K, const GroupElement& g);

// Inversion weight closed forms.
PlaneFn inversion_apply(PlaneFn phi);                    // (I phi)(x) = phi(1/x) / x^2
cplx inversion_trace_U(const GroupElement& g);          // Tr(U(g) I) = (1/2) e^{i p.sqrt q}
cplx inversion_weight_value(const GroupElement& g);     // e^{-i p.sqrt q} / q
// Tr I from the kernel delta(s + s') delta(theta + theta') in log-polar
// coordinates, each delta replaced by a nascent Gaussian of width sigma and
// integrated on a trapezoid grid.
double inversion_trace_regularized(double sigma = 0.05, int n_s = 4001, int n_theta = 512);

}  // namespace simquant
