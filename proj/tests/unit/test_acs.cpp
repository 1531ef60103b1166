#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/acs.hpp"
#include "simquant/errors.hpp"

using namespace simquant;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("fiducial is normalized and needs alpha > 2") {
    const Fiducial psi = make_fiducial(3.0);
    CHECK(2.0 * kPi * simpson([&](double r) { return psi.radial(r) * psi.radial(r) * r; }, 0.0, 80.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const double h = 1e-5;
    CHECK(psi.radial_deriv(1.3) == doctest::Approx((psi.radial(1.3 + h) - psi.radial(1.3 - h)) / (2 * h)).epsilon(1e-8));
    try {
        make_fiducial(2.0);
        FAIL("alpha = 2 accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AlphaTooSmall);
    }
}

TEST_CASE("c_beta matches Gamma ratios and diverges at the edge") {
    for (double alpha : {3.0, 4.5}) {
        const Fiducial psi = make_fiducial(alpha);
        for (double beta : {-3.0, -2.0, -1.0, 0.0, 1.0}) {
            const double ref = std::tgamma(alpha - beta - 1.0) / std::tgamma(alpha + 1.0);
            CHECK(c_constant(psi, beta) == doctest::Approx(ref).epsilon(1e-8));
            CHECK(c_gamma(alpha, beta) == doctest::Approx(ref).epsilon(1e-14));
        }
    }
    try {
        c_constant(make_fiducial(3.0), 2.0);
        FAIL("no divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergent);
    }
}

TEST_CASE("kinetic constants from the gradient of the fiducial") {
    const Fiducial psi = make_fiducial(3.0);
    const double p2 = 2.0 * kPi * simpson([&](double r) { return psi.radial_deriv(r) * psi.radial_deriv(r) * r; }, 0.0, 80.0);
    CHECK(p2_expectation(psi) == doctest::Approx(p2).epsilon(1e-8));
    CHECK(kinetic_constant(psi) == doctest::Approx(2.0 * kPi * p2).epsilon(1e-8));
    CHECK(gamma_squared(psi) == doctest::Approx(2.0 * p2).epsilon(1e-8));
}

TEST_CASE("lower symbols of powers and of p^2") {
    const Fiducial psi = make_fiducial(3.0);
    const AcsSymbol s = acs_lower_symbol(psi, ObservableSpec::parse("power:1"));
    CHECK(s.coefficient == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(s.eval({0.6, 0.8}, {}) == doctest::Approx(4.0).epsilon(1e-8));
    const AcsSymbol k = acs_lower_symbol(psi, ObservableSpec::parse("p2"));
    CHECK(k.inverse_square == doctest::Approx(gamma_squared(psi)).epsilon(1e-12));
    CHECK(k.eval({1.0, 0.0}, {0.3, 0.4}) == doctest::Approx(0.25 + gamma_squared(psi)).epsilon(1e-12));
    const AcsSymbol p = acs_lower_symbol(psi, ObservableSpec::parse("p:2"));
    CHECK(p.eval({2.0, 1.0}, {0.3, -0.7}) == doctest::Approx(-0.7).epsilon(1e-10));
}

TEST_CASE("moment identities for the real radial fiducial") {
    const MomentIdentities b = moment_identities(make_fiducial(3.0));
    CHECK(b.omega1 == doctest::Approx(2.0 * kPi * std::tgamma(2.0) / std::tgamma(4.0)).epsilon(1e-8));
    CHECK(b.gradient < 1e-4);
    CHECK(b.laplacian < 1e-4);
    CHECK(b.log_gradient < 1e-4);
}

TEST_CASE("Fubini-Study table of a radial fiducial") {
    const CTable t = fubini_study(make_fiducial(3.0));
    // Odd angular moments vanish and the two directions are equivalent.
    CHECK(t.B == 0.0);
    CHECK(t.C == 0.0);
    CHECK(t.F == 0.0);
    CHECK(t.D == doctest::Approx(t.E).epsilon(1e-12));
    CHECK(std::abs(t.c_m2_01) < 1e-8);
    const Eigen::Matrix4d g = fubini_study_metric(t, {1.2, 0.4});
    CHECK((g - g.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}
