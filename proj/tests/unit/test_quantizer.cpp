#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/basis.hpp"
#include "simquant/errors.hpp"
#include "simquant/quantizer.hpp"

using namespace simquant;
using Kind = ObservableSpec::Kind;

namespace {

constexpr double kPi = std::numbers::pi;

WeightPFT cs3() { return make_cs_weight(basis_fn({0, 0, 3.0})); }

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// psi(r) = N e^{-r/2} r with N = 1 / sqrt(2 pi Gamma(4)).
double psi_norm() { return 1.0 / std::sqrt(2.0 * kPi * 6.0); }

const PlaneFn probe = [](const CVec& x) {
    const CVec d = x - CVec{0.7, -0.4};
    return cplx(std::exp(-1.2 * d.modulus2()), 0.3 * x.c2 * std::exp(-x.modulus2()));
};

}  // namespace

TEST_CASE("observable specs parse") {
    CHECK(ObservableSpec::parse("p2").kind == Kind::KineticP2);
    CHECK(ObservableSpec::parse("power:-1.5").beta == -1.5);
    CHECK(ObservableSpec::parse("p:2").axis == 2);
    const ObservableSpec u = ObservableSpec::parse("upn:q,1,2");
    CHECK(u.kind == Kind::SeparableUPn);
    CHECK(u.n == 2);
    CHECK(ObservableSpec::parse("qdotp").kind == Kind::Dilation);
    CHECK(ObservableSpec::parse("qcrossp").kind == Kind::AngularMomentum);
    for (const char* bad : {"p:3", "power:x", "nonsense"}) {
        try {
            ObservableSpec::parse(bad);
            FAIL("accepted " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
        }
    }
}

TEST_CASE("power of |q| is multiplied by a Gamma ratio") {
    // c_{-1} / c_0 = Gamma(alpha) / Gamma(alpha - 1) = 2 at alpha = 3.
    const ClosedFormOperator op = quantize_observable(cs3(), ObservableSpec::parse("power:-1"));
    CHECK(std::abs(op.coefficient("ratio") - 2.0) < 1e-8);
}

TEST_CASE("momentum of a real radial fiducial quantizes to P") {
    const ClosedFormOperator op = quantize_observable(cs3(), ObservableSpec::parse("p:1"));
    CHECK(std::abs(op.coefficient("bracket1")) < 1e-6);
    CHECK(std::abs(op.coefficient("bracket2")) < 1e-6);
    const Field phi = sample(default_grid(), probe);
    const Field a = op.apply(phi), b = apply_P(phi, 1);
    CHECK(max_abs_diff(a, b) < 1e-5);
}

TEST_CASE("kinetic term carries <P^2> / c_0 times 1/Q^2") {
    const double N = psi_norm();
    const double p2 = 2.0 * kPi * simpson([N](double r) {
        const double d = N * std::exp(-r / 2.0) * (1.0 - r / 2.0);
        return d * d * r;
    }, 0.0, 80.0);
    const double c0 = 2.0 * kPi * simpson([N](double r) { return N * N * std::exp(-r) * r; }, 0.0, 80.0);
    const ClosedFormOperator op = quantize_observable(cs3(), ObservableSpec::parse("p2"));
    CHECK(op.coefficient("K").real() == doctest::Approx(p2 / c0).epsilon(1e-5));
    CHECK(std::abs(op.coefficient("K").imag()) < 1e-12);
}

TEST_CASE("inversion weight gives canonical operators") {
    const WeightPFT w = make_inversion_weight();
    const ClosedFormOperator d = quantize_observable(w, ObservableSpec::parse("qdotp"));
    CHECK(std::abs(d.coefficient("QdotP") - 1.0) < 1e-14);
    CHECK(std::abs(d.coefficient("QcrossP")) < 1e-14);
    CHECK(std::abs(d.coefficient("const") - cplx(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(quantize_observable(w, ObservableSpec::parse("p2")).coefficient("K")) < 1e-12);
    const ClosedFormOperator x1 = inversion_quantize_separable([](const CVec& q) { return cplx(q.c1); }, 1, 0);
    const Field phi = sample(default_grid(), probe);
    const Field ref = sample(default_grid(), [](const CVec& x) { return x.c1 * probe(x); });
    CHECK(max_abs_diff(x1.apply(phi), ref) < 1e-10);
}

TEST_CASE("legacy flag flips the Q x P coefficient") {
    // A fiducial with a sin(theta) density component makes Omega_(2,0,1) nonzero.
    const PlaneFn a = basis_fn({0, 0, 3.0}), b = basis_fn({0, 1, 3.0});
    const WeightPFT w = make_cs_weight([a, b](const CVec& x) { return (a(x) + cplx(0.0, 0.3) * b(x)) / std::sqrt(1.09); });
    const cplx now = quantize_observable(w, ObservableSpec::parse("qdotp")).coefficient("QcrossP");
    const cplx legacy = quantize_observable(w, ObservableSpec::parse("qdotp"), true).coefficient("QcrossP");
    CHECK(std::abs(now) > 1e-3);
    CHECK(std::abs(now + legacy) < 1e-14);
}

TEST_CASE("diagonal kernel of |q| and basis matrix of P^2") {
    const OperatorKernel A = quantize_kernel(cs3(), ObservableSpec::parse("power:1"));
    for (std::size_t i : {100u, 900u, 1500u})
        CHECK(std::abs(A.at(i, i) * A.grid->weight(i) - A.grid->node(i).modulus()) < 1e-6);
    const ClosedFormOperator p2 = quantize_observable(make_inversion_weight(), ObservableSpec::parse("p2"));
    const Eigen::MatrixXcd M = to_basis_matrix([&](const Field& f) { return p2.apply(f); }, 3.0, 1, 1);
    CHECK((M - M.adjoint()).norm() < 1e-6);
    // <e_00|P^2|e_00> = int |grad e_00|^2 = 1 / (4 alpha)
    CHECK(M(1, 1).real() == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
}
