#pragma once

#include <complex>
#include <functional>

namespace simquant {

using cplx = std::complex<double>;

// A point of the plane multiplied as a complex number: (c1, c2) <-> c1 + c2 e2.
struct CVec {
    double c1 = 0.0;
    double c2 = 0.0;

    CVec() = default;
    CVec(double a, double b) : c1(a), c2(b) {}
    explicit CVec(cplx z) : c1(z.real()), c2(z.imag()) {}

    static CVec from_polar(double r, double theta);

    cplx z() const { return {c1, c2}; }
    double modulus() const;
    double modulus2() const { return c1 * c1 + c2 * c2; }
    // Canonical angle in [0, 2pi).
    double angle() const;

    CVec operator+(const CVec& o) const { return {c1 + o.c1, c2 + o.c2}; }
    CVec operator-(const CVec& o) const { return {c1 - o.c1, c2 - o.c2}; }
    CVec operator-() const { return {-c1, -c2}; }
    CVec operator*(double s) const { return {c1 * s, c2 * s}; }
    bool operator==(const CVec& o) const { return c1 == o.c1 && c2 == o.c2; }
};

inline const CVec e1{1.0, 0.0};
inline const CVec e2{0.0, 1.0};

double canonical_angle(double theta);

CVec cmul(const CVec& a, const CVec& b);
// Throws Error(ZeroModulus) at the origin.
CVec cinv(const CVec& a);
CVec cconj(const CVec& a);
// a / b as complex division; throws ZeroModulus if b vanishes.
CVec cdiv(const CVec& a, const CVec& b);
double dot(const CVec& a, const CVec& b);
// a x b = a1 b2 - a2 b1
double cross(const CVec& a, const CVec& b);

// Point on the two-sheeted Riemann surface of the square root.
struct SheetedPoint {
    CVec base;
    int sheet = 1;  // 1 or 2
};

// Sheet 1 gives the root with angle theta/2 in [0, pi); sheet 2 its negation.
CVec csqrt_sheets(const SheetedPoint& q);

using PlaneFn = std::function<cplx(const CVec&)>;

// 1/2 [phi(sqrt q) + phi(-sqrt q)]: half weight on each root of x^2 = q.
cplx smeared_delta_pair(const CVec& q, const PlaneFn& phi);

// Result of a brute-force nascent-delta evaluation of the same pairing.
struct NascentDeltaResult {
    cplx extrapolated;
    cplx values[3];
    double eps[3];
};

// int d^2x G_eps(x - q/x) phi(x) on a fine polar grid around |x| = sqrt|q|,
// with G_eps the normalized Gaussian of variance eps per component, for each
// eps in {eps0, eps0/2, eps0/4}, followed by Richardson extrapolation eps -> 0.
NascentDeltaResult nascent_delta_pair(const CVec& q, const PlaneFn& phi, double eps0 = 0.1,
                                      int n_r = 600, int n_theta = 1024);

}  // namespace simquant
