#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/basis.hpp"
#include "simquant/errors.hpp"
#include "simquant/portraits.hpp"

using namespace simquant;

namespace {

constexpr double kPi = std::numbers::pi;

double c_beta(double alpha, double beta) { return std::tgamma(alpha - beta - 1.0) / std::tgamma(alpha + 1.0); }

WeightPFT cs3() { return make_cs_weight(basis_fn({0, 0, 3.0})); }

}  // namespace

TEST_CASE("Husimi value is |<U(g) psi|psi>|^2 / c_M") {
    const WeightPFT w = cs3();
    const double cM = 4.0 * kPi * kPi * c_beta(3.0, 0.0);
    CHECK(husimi_value(w, GroupElement::identity()).real() == doctest::Approx(1.0 / cM).epsilon(1e-8));
    for (const GroupElement& g : {GroupElement{{1.3, 0.4}, {0.2, -0.5}}, GroupElement{{0.5, -0.2}, {1.4, 0.3}}}) {
        const double ref = std::norm(matrix_element_U({0, 0, 3.0}, {0, 0, 3.0}, g)) / cM;
        CHECK(husimi_value(w, g).real() == doctest::Approx(ref).epsilon(1e-7));
        CHECK(husimi_value(w, g).real() >= 0.0);
    }
    CHECK_THROWS_AS(husimi_value(make_inversion_weight(), GroupElement::identity()), Error);
}

TEST_CASE("Husimi q-marginal formula matches direct integration over p") {
    const WeightPFT w = cs3();
    const PhaseSpaceSamples s = phase_samples();
    for (double q : {0.6, 1.5}) {
        const CVec qv{q, 0.0};
        const double ref = q_marginal(w, qv);
        CHECK(std::abs(q_marginal_direct(w, qv, s) - ref) / ref < 1e-3);
    }
}

TEST_CASE("lower symbol of |q| is c_1 c_-3 / c_0 |q|") {
    const double coef = c_beta(3.0, 1.0) * c_beta(3.0, -3.0) / c_beta(3.0, 0.0);
    const CVec q{0.8, 0.5};
    const cplx v = lower_symbol_position(cs3(), [](const CVec& x) { return cplx(x.modulus()); }, q);
    CHECK(v.real() == doctest::Approx(coef * q.modulus()).epsilon(1e-3));
    const cplx inv = lower_symbol_position(make_inversion_weight(), [](const CVec& x) { return cplx(x.c1); }, q);
    CHECK(std::abs(inv - q.c1) < 1e-14);
}

TEST_CASE("affine Wigner function is real with the right p-marginal") {
    const PlaneFn phi = basis_fn({1, 1, 3.0});
    const double R = support_radius(phi);
    CHECK(std::abs(wigner_aw(phi, CVec::from_polar(0.9, 0.3), CVec::from_polar(0.8, 2.0), R).imag()) < 1e-8);
    const CVec q = CVec::from_polar(1.1, 0.5);
    CHECK(std::abs(wigner_p_marginal(phi, q).value - std::norm(phi(q))) < 1e-3);
}

TEST_CASE("Wigner lower symbol of u(q) is u after extrapolation") {
    const SeparableSymbol f{[](const CVec& q) { return cplx(q.modulus2()); }, {}};
    const CVec q{0.7, 0.9};
    CHECK(std::abs(aw_lower_symbol(f, q, {0.3, -0.2}).value - q.modulus2()) < 1e-2);
}

TEST_CASE("evolution keeps eigenstates stationary and preserves mass") {
    const int n_max = 1, m_max = 1, nb = (n_max + 1) * (2 * m_max + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(nb, nb);
    for (int i = 0; i < nb; ++i) H(i, i) = 0.7 * i;
    Eigen::VectorXcd eig = Eigen::VectorXcd::Zero(nb);
    eig(1) = 1.0;
    const PhaseSpaceSamples coarse = phase_samples(6, 4, 0.2, 5.0, 4, 4, 3.0);
    const PhaseSpaceField a = evolve_density(H, eig, 0.0, 3.0, n_max, m_max, coarse);
    const PhaseSpaceField b = evolve_density(H, eig, 2.5, 3.0, n_max, m_max, coarse);
    double drift = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) drift = std::max(drift, std::abs(a.v[i] - b.v[i]));
    CHECK(drift < 1e-8);

    H(1, 4) = H(4, 1) = 0.3;
    Eigen::VectorXcd mix = Eigen::VectorXcd::Zero(nb);
    mix(1) = mix(4) = std::sqrt(0.5);
    const PhaseSpaceSamples s = phase_samples();
    for (double t : {0.0, 1.0, 5.0})
        CHECK(evolve_density(H, mix, t, 3.0, n_max, m_max, s, UpsilonNorm::Resolution).integrate().real() ==
              doctest::Approx(1.0).epsilon(0.02));

    H(0, 1) = 1.0;
    CHECK_THROWS_AS(evolve_density(H, mix, 1.0, 3.0, n_max, m_max, coarse), Error);
}
