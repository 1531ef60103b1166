#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simquant/errors.hpp"
#include "simquant/numerics.hpp"
#include "simquant/parallel.hpp"

using namespace simquant;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("special functions match the standard library") {
    for (double x : {0.1, 1.0, 7.5, 30.0}) {
        for (int n : {0, 1, 4})
            CHECK(bessel_j(n, x) == doctest::Approx(std::cyl_bessel_j(static_cast<double>(n), x)).epsilon(1e-12));
        CHECK(laguerre(3, 2.0, x) == doctest::Approx(std::assoc_laguerre(3u, 2u, x)).epsilon(1e-12));
    }
    CHECK(gamma_fn(4.5) == doctest::Approx(std::tgamma(4.5)).epsilon(1e-14));
    double js[6];
    bessel_j_range(5, 3.3, js);
    for (int n = 0; n <= 5; ++n) CHECK(js[n] == doctest::Approx(std::cyl_bessel_j(static_cast<double>(n), 3.3)).epsilon(1e-12));
}

TEST_CASE("Gauss rules are exact on polynomials") {
    const GaussRule gl = gauss_legendre(8, 0.5, 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * std::pow(gl.x[i], 9);
    CHECK(s == doctest::Approx((std::pow(2.0, 10) - std::pow(0.5, 10)) / 10.0).epsilon(1e-14));
    const GaussRule& la = gauss_laguerre(16, 2.5);
    double t = 0.0;
    for (std::size_t i = 0; i < la.x.size(); ++i) t += la.w[i] * la.x[i] * la.x[i];
    CHECK(t == doctest::Approx(std::tgamma(5.5)).epsilon(1e-12));
    const std::vector<double> w = fd_weights({-1.0, 0.0, 1.0, 2.0}, 0.0, 1);
    CHECK(w[0] * 1.0 + w[2] * 1.0 + w[3] * 4.0 == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("grid quadrature of Gaussians") {
    const GridPtr g = default_grid();
    const Field f = sample(g, [](const CVec& x) { return cplx(std::exp(-x.modulus2())); });
    // Exact integrals over the annulus [r_min, r_max].
    const double a = g->r_min() * g->r_min(), b = g->r_max() * g->r_max();
    CHECK(norm2(f) == doctest::Approx(kPi / 2.0 * (std::exp(-2.0 * a) - std::exp(-2.0 * b))).epsilon(1e-12));
    CHECK(integrate_plane(f).real() == doctest::Approx(kPi * (std::exp(-a) - std::exp(-b))).epsilon(1e-12));
    const Field h = sample(g, [](const CVec& x) { return cplx(x.c1 * std::exp(-x.modulus2())); });
    CHECK(std::abs(inner(f, h)) < 1e-14);
}

TEST_CASE("angular modes round-trip and interpolation is accurate") {
    const GridPtr g = default_grid();
    const PlaneFn fn = [](const CVec& x) {
        const CVec d = x - CVec{0.8, 0.3};
        return cplx(std::exp(-2.0 * d.modulus2()), x.c2 * std::exp(-x.modulus2()));
    };
    const Field f = sample(g, fn);
    CHECK(max_abs_diff(reconstruct(angular_decompose(f)), f) < 1e-13);
    const Interpolator I(f);
    double worst = 0.0;
    for (int k = 0; k < 300; ++k) {
        const CVec x = CVec::from_polar(0.05 + 0.013 * k, 0.37 * k);
        worst = std::max(worst, std::abs(I(x) - fn(x)));
    }
    CHECK(worst < 1e-6);
    CHECK(I(CVec{100.0, 0.0}) == cplx(0.0));
    CHECK_THROWS_AS(I(CVec{1e6, 0.0}), Error);
}

TEST_CASE("derivatives and Fourier transform of a Gaussian") {
    const GridPtr g = default_grid();
    const Field f = sample(g, [](const CVec& x) { return cplx(std::exp(-x.modulus2())); });
    // -Laplacian e^{-r^2} = (4 - 4 r^2) e^{-r^2}
    // Compared from r = 1e-2 outward: the 1/r^2 factor amplifies the one-sided
    // stencils at the inner edge.
    const Field lap = neg_laplacian(f);
    double worst_lap = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) {
        const CVec x = g->node(i);
        if (x.modulus() < 1e-2) continue;
        worst_lap = std::max(worst_lap, std::abs(lap.v[i] - (4.0 - 4.0 * x.modulus2()) * std::exp(-x.modulus2())));
    }
    CHECK(worst_lap < 1e-6);
    // -i d/dx1 e^{-r^2} = 2 i x1 e^{-r^2}
    const Field p1 = apply_P(f, 1);
    const Field ref1 = sample(g, [](const CVec& x) { return cplx(0.0, 2.0 * x.c1 * std::exp(-x.modulus2())); });
    CHECK(max_abs_diff(p1, ref1) < 1e-6);
    // (1/2pi) int e^{ip.x} e^{-r^2/2} d^2x = e^{-p^2/2}
    const Field gs = sample(g, [](const CVec& x) { return cplx(std::exp(-0.5 * x.modulus2())); });
    const Field hat = fourier2d(gs, +1);
    double worst = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i)
        worst = std::max(worst, std::abs(hat.v[i] - std::exp(-0.5 * hat.grid->node(i).modulus2())));
    CHECK(worst < 1e-8);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK(thread_count() >= 1);
}
