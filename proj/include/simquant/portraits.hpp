#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "simquant/quantizer.hpp"
#include "simquant/weights.hpp"

namespace simquant {

// Product sampling of phase space: polar q (Gauss-Legendre in log q, uniform
// angle) times polar p (Gauss-Legendre in log p above 1e-4 p_max, uniform angle).
struct PhaseSpaceSamples {
    std::vector<double> q_r, q_theta, p_r, p_theta;
    std::vector<double> w_qr, w_pr;  // radial weights including q^2 ds and p^2 ds

    std::size_t size() const { return q_r.size() * q_theta.size() * p_r.size() * p_theta.size(); }
    std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return ((a * q_theta.size() + b) * p_r.size() + c) * p_theta.size() + d;
    }
    CVec q(std::size_t a, std::size_t b) const { return CVec::from_polar(q_r[a], q_theta[b]); }
    CVec p(std::size_t c, std::size_t d) const { return CVec::from_polar(p_r[c], p_theta[d]); }
    // d^2q d^2p weight of sample (a, b, c, d).
    double weight(std::size_t a, std::size_t c) const;
};

PhaseSpaceSamples phase_samples(int nq_r = 48, int nq_t = 16, double q_min = 0.05, double q_max = 100.0,
                                int np_r = 24, int np_t = 16, double p_max = 12.0);

struct PhaseSpaceField {
    PhaseSpaceSamples s;
    std::vector<cplx> v;

    // sum of weight * v over the samples, divided by norm.
    cplx integrate(double norm = 1.0) const;
    double max_imag() const;
    double min_real() const;
};

// Evaluates F(q, p) on every sample, in parallel.
PhaseSpaceField tabulate(const PhaseSpaceSamples& s, const std::function<cplx(const CVec&, const CVec&)>& F);

// <U(q,p) psi | psi> for a fiducial given as a function. Radial fiducials use
// a Hankel integral; others a quadrature on the default grid.
cplx fiducial_overlap(const PlaneFn& psi, const GroupElement& g);
bool is_radial(const PlaneFn& psi);

// Tr(A U(g) M U(g)^dagger) with the kernel of M read pointwise from omega_hat.
cplx lower_symbol(const WeightPFT& w, const OperatorKernel& A, const GroupElement& g);
PhaseSpaceField lower_symbol(const WeightPFT& w, const OperatorKernel& A, const PhaseSpaceSamples& s);
// (1/((2 pi)^2 q^2)) int d^2x d^2y e^{ip.(x-y)} omega_hat(x/y, -x/q) omega_hat(y/x, -y) on a grid.
cplx trace_mm_formula(const WeightPFT& w, const GroupElement& g, GridPtr grid = nullptr);

// Lower symbol of u(q): (1/c_M) int d^2x omega_hat(1, x) (omega_hat(1, .) *_aff u)(q x).
cplx lower_symbol_position(const WeightPFT& w, const SymbolFn& u, const CVec& q);

// (1/c_M) Tr(M(g) M); for coherent-state weights |<U(g) psi|psi>|^2 / c_M.
cplx husimi_value(const WeightPFT& w, const GroupElement& g);
PhaseSpaceField husimi_density(const WeightPFT& w, const PhaseSpaceSamples& s);

// Marginals of the Husimi density. q: (1/c_M) int d^2x omega_hat(1,x) omega_hat(1,qx).
// p: -(1/(2 pi c_M)) int d^2x Omega(x) Lap_u[varpi(1/x, u)] at u = (1 - x*) p, radial fiducials only.
double q_marginal(const WeightPFT& w, const CVec& q);
double p_marginal(const WeightPFT& w, const CVec& p);
// Direct integrals of the Husimi density over p (resp. q) on the given sampling.
double q_marginal_direct(const WeightPFT& w, const CVec& q, const PhaseSpaceSamples& s);
double p_marginal_direct(const WeightPFT& w, const CVec& p, const PhaseSpaceSamples& s);

// AW(q,p) = 2 q^2 int d^2y |y|^-2 conj(phi(q y)) e^{i p.(q y - q/y)} phi(q/y), on a
// log-polar y rule symmetric under y -> 1/y. r_support bounds the support of phi.
cplx wigner_aw(const PlaneFn& phi, const CVec& q, const CVec& p, double r_support);
PhaseSpaceField wigner_aw(const PlaneFn& phi, const PhaseSpaceSamples& s, double r_support);
PhaseSpaceField wigner_aw(const Field& phi, const PhaseSpaceSamples& s);
// Radius beyond which |phi| stays below 1e-10 of its maximum along 16 rays.
double support_radius(const PlaneFn& phi, double r_max = 1e3);

struct Regularized {
    cplx value;      // Richardson limit eps -> 0
    cplx raw[3];     // at eps, eps/2, eps/4
    double eps[3];
};

// int d^2p/(4 pi^2) AW(q,p): p-integral with Gaussian damping, extrapolated in eps.
Regularized wigner_p_marginal(const PlaneFn& phi, const CVec& q, double eps0 = 0.1);
// int d^2q/(4 pi^2) AW(q,p) for phi = R(r) e^{i m theta}: the angle of q is
// integrated in closed form (a J0 factor), the rest by quadrature.
double wigner_q_marginal(const std::function<double(double)>& R, int m, double p, double r_support);
// |phi_hat(p)|^2 for phi = R(r) e^{i m theta}, by a Hankel integral.
double fourier_modulus2(const std::function<double(double)>& R, int m, double p, double r_support);
// int d^2q p-marginal(q) over q in [q_min, q_max] with n_t angles.
double wigner_mass(const PlaneFn& phi, int n_r = 48, int n_t = 16, double q_min = 1e-3, double q_max = 40.0);

// f = u(q) v(p) through the inversion weight. An empty vhat stands for v = 1,
// whose transform is 2 pi delta(y).
struct SeparableSymbol {
    SymbolFn u;
    std::function<cplx(const CVec&)> vhat;
};
// (1/pi) int d^2x x^-2 e^{ip.(x-1/x)} f_hat(q, x - 1/x), damped by e^{-eps |x-1/x|^2}
// (a normalized Gaussian of variance eps in place of delta(y) when vhat is empty),
// eps in {eps0, eps0/2, eps0/4}, Richardson-extrapolated. Throws
// RegularizationNotConverged if the last two extrapolants differ by more than tol.
Regularized aw_lower_symbol(const SeparableSymbol& f, const CVec& q, const CVec& p, double eps0 = 0.1,
                            double tol = 1e-2);

enum class UpsilonNorm { AsWritten, Resolution };  // 1/(2 pi c0) or 1/((2 pi)^2 c0)

// Upsilon(q, p, t) = norm |<q,p| e^{-iHt} phi>|^2 with |q,p> = U(q,p) e^{(alpha)}_{00},
// H and phi in the basis {e_nm : n <= n_max, |m| <= m_max} (to_basis_matrix order).
PhaseSpaceField evolve_density(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& phi, double t, double alpha,
                               int n_max, int m_max, const PhaseSpaceSamples& s,
                               UpsilonNorm norm = UpsilonNorm::AsWritten);

}  // namespace simquant
