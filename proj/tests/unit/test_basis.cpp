#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "simquant/basis.hpp"

using namespace simquant;

TEST_CASE("basis functions are orthonormal") {
    const GridPtr g = default_grid();
    std::vector<BasisIndex> idx;
    for (int n = 0; n <= 4; ++n)
        for (int m = -3; m <= 3; ++m) idx.push_back({n, m, 3.0});
    std::vector<Field> f;
    for (const auto& b : idx) f.push_back(basis_eval(b, g));
    double worst = 0.0;
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = a; b < f.size(); ++b)
            worst = std::max(worst, std::abs(inner(f[a], f[b]) - (a == b ? 1.0 : 0.0)));
    CHECK(worst < 1e-8);
}

TEST_CASE("ground state has the closed form of the fiducial") {
    // e_00(x) = e^{-x/2} x^{(alpha-1)/2} / sqrt(2 pi Gamma(alpha + 1))
    for (double r : {0.1, 1.0, 4.0})
        CHECK(basis_radial(0, 3.0, r) ==
              doctest::Approx(std::exp(-r / 2.0) * r / std::sqrt(2.0 * M_PI * std::tgamma(4.0))).epsilon(1e-13));
}

TEST_CASE("matrix elements agree with grid inner products of transported states") {
    const GridPtr g = default_grid();
    const GroupElement el{{1.1, 0.35}, {0.4, -0.25}};
    for (const auto& [a, b] : std::vector<std::pair<BasisIndex, BasisIndex>>{
             {{0, 0, 3.0}, {0, 0, 3.0}}, {{1, -1, 3.0}, {0, 1, 3.0}}, {{2, 1, 3.0}, {1, 0, 3.0}}}) {
        const cplx ref = inner(basis_eval(a, g), sample(g, uir_fn(el, basis_fn(b))));
        CHECK(std::abs(matrix_element_U(a, b, el) - ref) < 1e-6);
        CHECK(std::abs(matrix_element_U_panels(a, b, el) - ref) < 1e-6);
    }
}

TEST_CASE("matrix elements at the identity are the Kronecker delta") {
    for (int n = 0; n <= 2; ++n)
        for (int m = -1; m <= 1; ++m)
            CHECK(std::abs(matrix_element_U({n, m, 3.0}, {1, 0, 3.0}, GroupElement::identity()) -
                           ((n == 1 && m == 0) ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("initial node count follows max(200, 8 p x_max) rounded to a power of two") {
    const int n = matrix_element_nodes(1.0, 0.1, 3.0);
    CHECK(n >= 200);
    CHECK((n & (n - 1)) == 0);
    CHECK(matrix_element_nodes(1.0, 50.0, 3.0) > n);
}
