#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "simquant/basis.hpp"
#include "simquant/weights.hpp"

namespace simquant {

// f_hat(q, y): Fourier transform of a phase-space symbol in its momentum variable.
using FhatFn = std::function<cplx(const CVec& q, const CVec& y)>;
using SymbolFn = std::function<cplx(const CVec& q)>;

struct ObservableSpec {
    enum class Kind { One, PowerQ, PositionVec, Momentum, KineticP2, Dilation, AngularMomentum, SeparableUPn, SampledF };
    Kind kind = Kind::One;
    double beta = 1.0;   // PowerQ; also the exponent of u = q^beta in SeparableUPn
    int axis = 1;        // PositionVec, Momentum, SeparableUPn
    int n = 1;           // SeparableUPn
    FhatFn fhat;         // SampledF
    std::string text;

    // "one", "power:B", "q[:I]", "p[:I]", "p2", "qdotp", "qcrossp", "upn:U,I,N" with
    // U in {1, q, q^B}. "p2" is the kinetic symbol p^2; I defaults to 1.
    static ObservableSpec parse(const std::string& s);
};

// Spatial operator applied before the multiplier of a term.
struct Deriv {
    int axis = 0;  // 0 = none, 1 or 2 = P_axis^power
    int power = 0;
    bool laplacian = false;  // P^2 = -Laplacian
};

struct Term {
    cplx coef = 1.0;
    SymbolFn mult;  // empty = 1
    std::string label;
    Deriv d;
};

// Sum of coef * mult(Q) * D terms.
struct ClosedFormOperator {
    std::string name;
    std::vector<Term> terms;
    // Named scalar coefficients for reports (e.g. the 1/Q^2 strength).
    std::vector<std::pair<std::string, cplx>> coefficients;

    Field apply(const Field& phi) const;
    cplx coefficient(const std::string& key) const;
};

// Multiplication by (1/c_M)(w *_aff u)(x) with w(x) = 2 pi omega_hat(1, -x).
ClosedFormOperator quantize_multiplier(const WeightPFT& w, const SymbolFn& u, const std::string& label = "u");
// Closed forms with coefficients from the Omega table. legacy_6_28 puts a plus
// sign on the Omega_(2,0,1) Q x P term of the dilation operator.
ClosedFormOperator quantize_observable(const WeightPFT& w, const ObservableSpec& spec, bool legacy_6_28 = false);

// Separable u(q) p_l^n through the general kernel: sum_s C(n,s) c_s(x) P_l^s with
// c_s(x) = (2 pi / c_M)(-i d/dx'_l)^{n-s} H_u(x, x')|_{x'=x},
// H_u(x, x') = (x^2/x'^2) int d^2y y^-2 omega_hat(x/x', -y) u(x/y),
// x'-derivatives by central differences of step h.
ClosedFormOperator quantize_separable_kernel(const WeightPFT& w, const SymbolFn& u, int axis, int n, double h = 1e-3);
// Coefficient functions c_s(x) of the above, s = 0..n, at one point.
std::vector<cplx> separable_kernel_coefficients(const WeightPFT& w, const SymbolFn& u, int axis, int n, const CVec& x,
                                                double h = 1e-3);

// A(x, x') = (1/c_M)(x^2/x'^2) int d^2q q^-2 omega_hat(x/x', -q) f_hat(x/q, x' - x).
cplx quantize_kernel_entry(const WeightPFT& w, const FhatFn& fhat, const CVec& x, const CVec& xp, double cM);
OperatorKernel quantize_kernel(const WeightPFT& w, const ObservableSpec& spec, GridPtr grid = nullptr);

// Inversion weight: A(x, x') = (1/2 pi) f_hat(x sqrt(x'/x), x' - x), the root of x x'
// equal to x on the diagonal.
OperatorKernel inversion_quantize(const FhatFn& fhat, GridPtr grid = nullptr);
// u(q) p_l^n under the inversion weight: the kernel derivative rule with
// u(x sqrt(x'/x)) differentiated in x'.
ClosedFormOperator inversion_quantize_separable(const SymbolFn& u, int axis, int n, double h = 1e-3);

// v(P) as a Fourier multiplier: inverse transform of v(p) phi_hat(p).
Field fourier_multiplier(const Field& phi, const std::function<cplx(const CVec&)>& v, GridPtr pgrid = nullptr);

Field apply_operator(const OperatorKernel& A, const Field& phi);
Field apply_operator(const ClosedFormOperator& A, const Field& phi);

// Entries <e_{nm} | A e_{n'm'}> over n <= n_max, |m| <= m_max (row index n*(2m_max+1) + m + m_max).
using FieldOp = std::function<Field(const Field&)>;
Eigen::MatrixXcd to_basis_matrix(const FieldOp& A, double alpha, int n_max, int m_max, GridPtr grid = nullptr);

}  // namespace simquant
