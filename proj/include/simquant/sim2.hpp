#pragma once

#include <functional>

#include "simquant/cplane.hpp"
#include "simquant/numerics.hpp"

namespace simquant {

// A point (q, p) of the similitude group; q is punctured, p is any vector.
struct GroupElement {
    CVec q{1.0, 0.0};
    CVec p{0.0, 0.0};

    static GroupElement identity() { return {}; }
};

GroupElement compose(const GroupElement& g1, const GroupElement& g2);
GroupElement inverse(const GroupElement& g);
double group_distance(const GroupElement& a, const GroupElement& b);

// (U(q,p) phi)(x) = e^{i p.x} phi(x/q) / q on functions.
PlaneFn uir_fn(const GroupElement& g, PlaneFn phi);
// Multiplication by (2 pi / x)^power.
PlaneFn duflo_moore_fn(int power, PlaneFn phi);

// Grid versions. The transported field is evaluated through an Interpolator;
// coverage_loss receives the fraction of nodes whose preimage left the annulus.
Field uir_apply(const GroupElement& g, const Field& phi, double* coverage_loss = nullptr);
Field duflo_moore_apply(const Field& phi, int power);

// Max over interior nodes of |[U C^{-1} - (1/q) C^{-1} U] phi|, with phi read
// through its interpolant on both sides.
double check_dm_commutation(const GroupElement& g, const Field& phi);

// Relative difference between the quadratures of F(g0 g) and F(g) against
// d^2q d^2p over a box that contains the support of the test function.
using PhaseFn = std::function<double(const GroupElement&)>;
double haar_invariance_residual(const GroupElement& g0, const PhaseFn& F);

}  // namespace simquant
