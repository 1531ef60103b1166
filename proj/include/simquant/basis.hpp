#pragma once

#include <vector>

#include "simquant/numerics.hpp"
#include "simquant/sim2.hpp"

namespace simquant {

struct BasisIndex {
    int n = 0;
    int m = 0;
    double alpha = 3.0;
};

// Radial factor of e_{nm} including the angular normalization 1/sqrt(2 pi):
// e_{nm}(x) = basis_radial(n, alpha, |x|) e^{i m theta}.
double basis_radial(int n, double alpha, double r);
PlaneFn basis_fn(const BasisIndex& idx);
Field basis_eval(const BasisIndex& idx, GridPtr grid);

// <e_{idx1} | U(g) e_{idx2}> from the one-dimensional Laguerre-Bessel integral,
// on a Gauss-Laguerre rule refined by doubling until two successive rules
// agree to tol.
cplx matrix_element_U(const BasisIndex& idx1, const BasisIndex& idx2, const GroupElement& g,
                      double tol = 1e-11);

// Node count of the first rule tried: max(200, 8 p x_max), rounded up to a
// power of two.
int matrix_element_nodes(double q, double p, double alpha);

// Same matrix element by composite Gauss-Legendre panels in r (independent path).
cplx matrix_element_U_panels(const BasisIndex& idx1, const BasisIndex& idx2, const GroupElement& g);

struct ResolutionEstimate {
    double value = 0.0;
    double error_bar = 0.0;  // change when each panel drops from 16 to 10 nodes
    double box_q_min = 0.0, box_q_max = 0.0, box_p_max = 0.0;
};

// (1/||C psi||^2) int |<e_probe|U(q,p) psi>|^2 d^2q d^2p over a truncated box,
// for a radial fiducial psi (BadRange otherwise). samples / 16 Gauss panels
// cover log q; p gets twice as many panels.
ResolutionEstimate resolution_check(double alpha, const Field& psi, const BasisIndex& probe, int samples = 64);

}  // namespace simquant
