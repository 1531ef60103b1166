#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/basis.hpp"
#include "simquant/errors.hpp"
#include "simquant/weights.hpp"

using namespace simquant;

namespace {

constexpr double kPi = std::numbers::pi;

// Gamma(alpha - beta - 1) / Gamma(alpha + 1)
double c_beta(double alpha, double beta) { return std::tgamma(alpha - beta - 1.0) / std::tgamma(alpha + 1.0); }

WeightPFT cs3() { return make_cs_weight(basis_fn({0, 0, 3.0})); }

}  // namespace

TEST_CASE("coherent-state weight moments are Gamma ratios") {
    const WeightPFT w = cs3();
    for (double beta : {-2.0, -1.0, 0.0, 1.0})
        CHECK(omega(w, beta, 0, 0, {1.0, 0.0}).real() == doctest::Approx(2.0 * kPi * c_beta(3.0, beta)).epsilon(1e-8));
    CHECK(c_M(w) == doctest::Approx(4.0 * kPi * kPi * c_beta(3.0, 0.0)).epsilon(1e-8));
    CHECK(std::abs(unit_trace(w) - 1.0) < 1e-8);
    CHECK_THROWS_AS(omega(w, 2.0, 0, 0, {1.0, 0.0}), Error);
}

TEST_CASE("coherent-state weight satisfies the symmetry condition") {
    CHECK(symmetry_residual_pft(cs3(), 50, 7) < 1e-8);
}

TEST_CASE("kernel trace recovers varpi(1, 0) = 1") {
    const OperatorKernel M = m_kernel(cs3());
    CHECK(std::abs(M.trace() - 1.0) < 1e-4);
    CHECK(std::abs(weight_from_kernel(M, GroupElement::identity()) - 1.0) < 1e-4);
}

TEST_CASE("inversion weight closed forms") {
    // omega_hat(u, y) = (2 pi / |u|) delta(y + sqrt u) gives Omega_beta(u) = 2 pi |u|^{-1 - (beta + 2)/2}.
    const WeightPFT w = make_inversion_weight();
    const CVec u{1.7, -0.6};
    const double um = u.modulus();
    CHECK(std::abs(omega(w, 0.0, 0, 0, u) - 2.0 * kPi / (um * um)) < 1e-12);
    CHECK(std::abs(omega(w, -2.0, 0, 0, u) - 2.0 * kPi / um) < 1e-12);
    // First moment picks up the root itself.
    const cplx root = std::sqrt(u.z());
    CHECK(std::abs(omega(w, -1.0, 1, 0, u) - 2.0 * kPi / um * std::pow(um, -0.5) * root.real()) < 1e-12);
    CHECK(c_M(w) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-14));
    CHECK_THROWS_AS(w(u, u), Error);
    CHECK(std::abs(inversion_trace_U(GroupElement::identity()) - 0.5) < 1e-15);
    CHECK(inversion_trace_regularized() == doctest::Approx(0.5).epsilon(1e-6));
    const PlaneFn phi = [](const CVec& x) { return cplx(std::exp(-x.modulus2()) * x.c1); };
    const PlaneFn twice = inversion_apply(inversion_apply(phi));
    CHECK(std::abs(twice({0.4, 1.3}) - phi({0.4, 1.3})) < 1e-15);
}
