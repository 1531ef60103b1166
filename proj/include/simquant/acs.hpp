#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "simquant/numerics.hpp"
#include "simquant/quantizer.hpp"
#include "simquant/weights.hpp"

namespace simquant {

// psi_alpha(x) = sqrt(N) e^{-x/2} x^{(alpha-1)/2}, N = 1 / (2 pi Gamma(alpha + 1)).
struct Fiducial {
    double alpha = 3.0;
    double norm_const = 0.0;  // N
    std::function<double(double)> radial;        // psi as a function of |x|
    std::function<double(double)> radial_deriv;  // d psi / d|x|
    PlaneFn fn;
    Field field;  // samples on the default grid
};

// AlphaTooSmall unless alpha > 2.
Fiducial make_fiducial(double alpha = 3.0);

// c_{beta nu1 nu2} = int d^2x x^{-(2+beta)} |psi|^2 x1^nu1 x2^nu2, radial quadrature
// with the angular integral in closed form. Divergent unless beta < alpha - 1 + nu1 + nu2.
double c_constant(const Fiducial& psi, double beta, int nu1 = 0, int nu2 = 0);
// Gamma(alpha - beta - 1) / Gamma(alpha + 1).
double c_gamma(double alpha, double beta);

// <P^2 psi|psi> = int |grad psi|^2 by radial quadrature.
double p2_expectation(const Fiducial& psi);
// K = 2 pi <P^2 psi|psi>.
double kinetic_constant(const Fiducial& psi);
// gamma^2 = 2 <P^2 psi|psi>.
double gamma_squared(const Fiducial& psi);

// Lower symbol in the form coefficient * f + inverse_square / q^2.
struct AcsSymbol {
    std::string name;
    double coefficient = 1.0;
    double inverse_square = 0.0;
    std::function<double(const CVec& q, const CVec& p)> eval;
};
// PowerQ: (c_beta c_{-beta-2} / c0) q^beta; Momentum: p; KineticP2: p^2 + gamma^2/q^2.
AcsSymbol acs_lower_symbol(const Fiducial& psi, const ObservableSpec& spec);

// Components of <(1/Q) P psi|psi> with (1/Q) P read as a complex product.
std::array<cplx, 2> inverse_q_p_expectation(const Fiducial& psi);

struct MomentIdentities {
    double omega1;                 // Omega_0(1)
    std::array<double, 2> grad;    // grad Omega_0 at 1
    double lap;                    // Laplacian of Omega_0 at 1
    double p2;                     // <P^2 psi|psi>
    std::array<cplx, 2> inv_q_p;   // <(1/Q) P psi|psi>
    // Residuals of the four identities.
    double gradient, laplacian, log_gradient, kinetic_sum;
};
MomentIdentities moment_identities(const Fiducial& psi);

struct CTable {
    double alpha = 3.0;
    std::vector<std::pair<double, double>> c_beta;  // (beta, c_beta)
    double c_m2_10 = 0.0, c_m2_01 = 0.0;
    double p2 = 0.0, gamma2 = 0.0, K = 0.0;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0;
    double G = 0.0;  // coefficient with no defining integral; held at 0
};
// ChoiceViolated if |c_{-2 0 1}| > 1e-8.
CTable fubini_study(const Fiducial& psi);
// Metric in the coordinates (dq1, dq2, dp1, dp2) at q.
Eigen::Matrix4d fubini_study_metric(const CTable& t, const CVec& q);

}  // namespace simquant
