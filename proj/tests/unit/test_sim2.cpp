#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "simquant/errors.hpp"
#include "simquant/sim2.hpp"

using namespace simquant;

namespace {

const GroupElement ga{{1.2, 0.5}, {0.3, -0.7}};
const GroupElement gb{{-0.4, 0.9}, {1.1, 0.2}};
const GroupElement gc{{0.8, -0.8}, {-0.5, 0.4}};

const PlaneFn bump = [](const CVec& x) {
    const CVec d = x - CVec{0.9, -0.4};
    return cplx(std::exp(-1.5 * d.modulus2()), 0.2 * x.c1 * std::exp(-x.modulus2()));
};

}  // namespace

TEST_CASE("group law") {
    // (q,p)(q',p') = (q q', p'/q* + p) written out component-wise.
    const cplx q = ga.q.z(), qp = gb.q.z(), p = ga.p.z(), pp = gb.p.z();
    const GroupElement ab = compose(ga, gb);
    CHECK(std::abs(ab.q.z() - q * qp) < 1e-15);
    CHECK(std::abs(ab.p.z() - (pp / std::conj(q) + p)) < 1e-15);
    CHECK(group_distance(compose(compose(ga, gb), gc), compose(ga, compose(gb, gc))) < 1e-14);
    CHECK(group_distance(compose(ga, inverse(ga)), GroupElement::identity()) < 1e-15);
    CHECK(group_distance(compose(GroupElement::identity(), ga), ga) < 1e-15);
}

TEST_CASE("representation is a homomorphism on functions") {
    const PlaneFn lhs = uir_fn(ga, uir_fn(gb, bump));
    const PlaneFn rhs = uir_fn(compose(ga, gb), bump);
    for (int k = 0; k < 40; ++k) {
        const CVec x = CVec::from_polar(0.2 + 0.1 * k, 0.7 * k);
        CHECK(std::abs(lhs(x) - rhs(x)) < 1e-14);
    }
    CHECK_THROWS_AS(uir_fn({{0.0, 0.0}, {1.0, 0.0}}, bump), Error);
}

TEST_CASE("representation is unitary on sampled fields") {
    const GridPtr grid = default_grid();
    const Field phi = sample(grid, bump);
    const Field u = sample(grid, uir_fn(ga, bump));
    CHECK(norm2(u) == doctest::Approx(norm2(phi)).epsilon(1e-8));
    double loss = 1.0;
    const Field v = uir_apply(gb, phi, &loss);
    CHECK(norm2(v) == doctest::Approx(norm2(phi)).epsilon(1e-4));
    CHECK(loss < 0.1);
}

TEST_CASE("Duflo-Moore operator intertwines up to 1/q") {
    const Field phi = sample(default_grid(), bump);
    CHECK(check_dm_commutation(ga, phi) < 1e-10);
    const Field c = duflo_moore_apply(phi, -1);
    const Field back = duflo_moore_apply(c, 1);
    CHECK(max_abs_diff(back, phi) < 1e-14);
    CHECK_THROWS_AS(duflo_moore_apply(phi, 2), Error);
}

TEST_CASE("d^2q d^2p is left invariant") {
    const PhaseFn F = [](const GroupElement& g) {
        const double lq = std::log(g.q.modulus());
        return std::exp(-2.0 * lq * lq - g.p.modulus2()) * (1.0 + 0.3 * std::cos(g.q.angle()));
    };
    CHECK(haar_invariance_residual({{1.1, -0.3}, {0.4, 0.2}}, F) < 1e-6);
}
