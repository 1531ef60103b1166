#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/cplane.hpp"
#include "simquant/errors.hpp"

using namespace simquant;

TEST_CASE("complex multiplication, inverse and division agree with std::complex") {
    const CVec a{0.7, -1.3}, b{-2.1, 0.4};
    const cplx za = a.z(), zb = b.z();
    CHECK(std::abs(cmul(a, b).z() - za * zb) < 1e-15);
    CHECK(std::abs(cinv(a).z() - 1.0 / za) < 1e-15);
    CHECK(std::abs(cdiv(a, b).z() - za / zb) < 1e-15);
    CHECK(std::abs(cconj(a).z() - std::conj(za)) == 0.0);
    CHECK(dot(a, b) == doctest::Approx(0.7 * -2.1 + -1.3 * 0.4));
    CHECK(cross(a, b) == doctest::Approx(0.7 * 0.4 - -1.3 * -2.1));
}

TEST_CASE("division by the origin raises ZeroModulus") {
    try {
        cinv(CVec{0.0, 0.0});
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroModulus);
    }
    CHECK_THROWS_AS(cdiv(e1, CVec{}), Error);
}

TEST_CASE("angles are canonical in [0, 2 pi)") {
    CHECK(CVec{-1.0, -1e-300}.angle() >= 0.0);
    CHECK(CVec{-1.0, -1e-300}.angle() < 2.0 * std::numbers::pi);
    CHECK(canonical_angle(-0.5) == doctest::Approx(2.0 * std::numbers::pi - 0.5));
    const CVec p = CVec::from_polar(2.0, 5.0);
    CHECK(p.modulus() == doctest::Approx(2.0));
    CHECK(p.angle() == doctest::Approx(5.0));
}

TEST_CASE("square-root sheets square back to the base point") {
    for (double th : {0.1, 1.7, 3.5, 6.0}) {
        const CVec q = CVec::from_polar(2.5, th);
        const CVec r1 = csqrt_sheets({q, 1}), r2 = csqrt_sheets({q, 2});
        CHECK(std::abs(cmul(r1, r1).z() - q.z()) < 1e-14);
        CHECK(std::abs(r2.z() + r1.z()) < 1e-15);
        CHECK(r1.angle() < std::numbers::pi);
    }
}

TEST_CASE("nascent delta of x - q/x puts weight 1/4 on each root") {
    // |d(x - q/x)/dx|^2 = |1 + q/x^2|^2 = 4 at x^2 = q.
    const PlaneFn phi = [](const CVec& x) { return cplx(std::exp(-0.5 * (x - CVec{0.3, 0.2}).modulus2()), 0.1 * x.c2); };
    const CVec q{0.8, 0.6};
    const CVec r = csqrt_sheets({q, 1});
    const cplx quarter = 0.25 * (phi(r) + phi(-r));
    const NascentDeltaResult res = nascent_delta_pair(q, phi);
    CHECK(std::abs(res.extrapolated - quarter) < 1e-3);
    CHECK(std::abs(smeared_delta_pair(q, phi) - 2.0 * quarter) < 1e-14);
}
