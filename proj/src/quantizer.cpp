#include "simquant/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "simquant/errors.hpp"
#include "simquant/parallel.hpp"

namespace simquant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
const cplx kI{0.0, 1.0};

// Product rule over the plane: Gauss-Legendre panels in log y, trapezoid in angle.
struct PlaneNodes {
    std::vector<CVec> y;
    std::vector<double> w;  // includes the area element y^2 ds dtheta
};

PlaneNodes plane_nodes(double y_min, double y_max, int per_panel, double width, int n_theta) {
    const GaussRule unit = gauss_legendre(per_panel, 0.0, 1.0);
    PlaneNodes out;
    const double s_lo = std::log(y_min), s_hi = std::log(y_max);
    const int panels = std::max(1, static_cast<int>(std::ceil((s_hi - s_lo) / width)));
    const double h = (s_hi - s_lo) / panels;
    for (int b = 0; b < panels; ++b)
        for (int i = 0; i < per_panel; ++i) {
            const double r = std::exp(s_lo + h * (b + unit.x[i]));
            for (int k = 0; k < n_theta; ++k) {
                out.y.push_back(CVec::from_polar(r, kTwoPi * k / n_theta));
                out.w.push_back(h * unit.w[i] * r * r * kTwoPi / n_theta);
            }
        }
    return out;
}

// Nodes y and weights W(y) = quadrature weight * y^-2 * 2 pi omega_hat(1, -y),
// dropping nodes whose contribution is below 1e-17 of the largest.
struct ConvolutionRule {
    std::vector<CVec> y;
    std::vector<cplx> W;
};

ConvolutionRule convolution_rule(const WeightPFT& w) {
    const PlaneNodes pn = plane_nodes(w.y_min, w.y_max, 12, 0.5, 64);
    std::vector<cplx> W(pn.y.size());
    parallel_for(pn.y.size(), [&](std::size_t k) {
        W[k] = pn.w[k] / pn.y[k].modulus2() * kTwoPi * w({1.0, 0.0}, -pn.y[k]);
    });
    double big = 0.0;
    for (const auto& v : W) big = std::max(big, std::abs(v));
    ConvolutionRule rule;
    for (std::size_t k = 0; k < W.size(); ++k)
        if (std::abs(W[k]) > 1e-17 * big) {
            rule.y.push_back(pn.y[k]);
            rule.W.push_back(W[k]);
        }
    return rule;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

SymbolFn power_symbol(double beta) {
    return [beta](const CVec& q) { return cplx(std::pow(q.modulus(), beta)); };
}

SymbolFn inv_q2() {
    return [](const CVec& x) { return cplx(1.0 / x.modulus2()); };
}

SymbolFn coordinate(int axis) {
    return [axis](const CVec& x) { return cplx(axis == 1 ? x.c1 : x.c2); };
}

// Component l of (x (w1 + i w2)) / x^2 for complex components w1, w2.
SymbolFn rotated_over_q(cplx w1, cplx w2, int axis) {
    return [w1, w2, axis](const CVec& x) {
        const double x2 = x.modulus2();
        return axis == 1 ? (x.c1 * w1 - x.c2 * w2) / x2 : (x.c1 * w2 + x.c2 * w1) / x2;
    };
}

// Square root of x x' that reduces to x on the diagonal: x sqrt(x'/x), principal root of the ratio.
CVec diagonal_root(const CVec& x, const CVec& xp) { return CVec(x.z() * std::sqrt(xp.z() / x.z())); }

Term term(cplx coef, SymbolFn mult, std::string label, Deriv d = {}) {
    return Term{coef, std::move(mult), std::move(label), d};
}

Deriv P(int axis, int power = 1) { return Deriv{axis, power, false}; }

void check_axis(int axis) {
    if (axis != 1 && axis != 2) throw Error(ErrorKind::BadRange, "axis must be 1 or 2");
}

// Central-difference weights for derivatives 0..n at 0 on the stencil k*step, |k| <= 3.
std::vector<std::vector<double>> stencil_weights(int n, double step) {
    std::vector<double> xs;
    for (int k = -3; k <= 3; ++k) xs.push_back(k * step);
    std::vector<std::vector<double>> out;
    for (int d = 0; d <= n; ++d) out.push_back(fd_weights(xs, 0.0, d));
    return out;
}

}  // namespace

ObservableSpec ObservableSpec::parse(const std::string& s) {
    ObservableSpec spec;
    spec.text = s;
    auto bad = [&](const std::string& why) { return Error(ErrorKind::ParseError, "observable '" + s + "': " + why); };
    auto number = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw bad("trailing characters in '" + t + "'");
            return v;
        } catch (const std::logic_error&) {
            throw bad("not a number: '" + t + "'");
        }
    };
    auto axis_of = [&](const std::string& rest) {
        if (rest.empty()) return 1;
        const double a = number(rest);
        if (a != 1.0 && a != 2.0) throw bad("axis must be 1 or 2");
        return static_cast<int>(a);
    };
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "one" || head == "1") {
        spec.kind = Kind::One;
    } else if (head == "power") {
        spec.kind = Kind::PowerQ;
        spec.beta = number(rest);
    } else if (head == "q") {
        spec.kind = Kind::PositionVec;
        spec.axis = axis_of(rest);
    } else if (head == "p") {
        spec.kind = Kind::Momentum;
        spec.axis = axis_of(rest);
    } else if (head == "p2") {
        spec.kind = Kind::KineticP2;
    } else if (head == "qdotp") {
        spec.kind = Kind::Dilation;
    } else if (head == "qcrossp") {
        spec.kind = Kind::AngularMomentum;
    } else if (head == "upn") {
        spec.kind = Kind::SeparableUPn;
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        for (std::string t; std::getline(ss, t, ',');) parts.push_back(t);
        if (parts.size() != 3) throw bad("expected upn:u,i,n");
        const std::string& u = parts[0];
        if (u == "1")
            spec.beta = 0.0;
        else if (u == "q")
            spec.beta = 1.0;
        else if (u.rfind("q^", 0) == 0)
            spec.beta = number(u.substr(2));
        else
            throw bad("u must be 1, q or q^B");
        spec.axis = axis_of(parts[1]);
        const double n = number(parts[2]);
        if (n < 0 || n != std::floor(n)) throw bad("n must be a non-negative integer");
        spec.n = static_cast<int>(n);
    } else {
        throw bad("unknown observable");
    }
    return spec;
}

Field ClosedFormOperator::apply(const Field& phi) const {
    std::map<std::tuple<int, int, bool>, Field> cache;
    auto derived = [&](const Deriv& d) -> const Field& {
        const auto key = std::make_tuple(d.axis, d.power, d.laplacian);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Field f = phi;
        if (d.laplacian)
            f = neg_laplacian(f);
        else
            for (int k = 0; k < d.power; ++k) f = apply_P(f, d.axis);
        return cache.emplace(key, std::move(f)).first->second;
    };
    Field out(phi.grid);
    for (const Term& t : terms) {
        const Field& f = derived(t.d);
        parallel_for(phi.size(), [&](std::size_t i) {
            const cplx m = t.mult ? t.mult(phi.grid->node(i)) : cplx(1.0);
            out.v[i] += t.coef * m * f.v[i];
        });
    }
    return out;
}

cplx ClosedFormOperator::coefficient(const std::string& key) const {
    for (const auto& [k, v] : coefficients)
        if (k == key) return v;
    throw Error(ErrorKind::BadRange, "operator " + name + " has no coefficient '" + key + "'");
}

ClosedFormOperator quantize_multiplier(const WeightPFT& w, const SymbolFn& u, const std::string& label) {
    ClosedFormOperator op;
    op.name = "multiplier(" + label + ")";
    if (w.kind == WeightKind::Inversion) {
        op.terms.push_back(term(1.0, u, label));
        return op;
    }
    const double cM = c_M(w);
    auto rule = std::make_shared<ConvolutionRule>(convolution_rule(w));
    SymbolFn conv = [rule, u, cM](const CVec& x) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < rule->y.size(); ++k) acc += rule->W[k] * u(cdiv(x, rule->y[k]));
        return acc / cM;
    };
    op.terms.push_back(term(1.0, conv, "(w*" + label + ")/c_M"));
    return op;
}

std::vector<cplx> separable_kernel_coefficients(const WeightPFT& w, const SymbolFn& u, int axis, int n,
                                                const CVec& x, double h) {
    check_axis(axis);
    if (n < 0 || n > 4) throw Error(ErrorKind::BadRange, "separable order n must lie in [0, 4]");
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "use inversion_quantize_separable");
    const double cM = c_M(w);
    const PlaneNodes pn = plane_nodes(w.y_min, w.y_max, 12, 0.5, 64);
    const double step = h * 20.0 * x.modulus();
    const CVec e = axis == 1 ? CVec{1.0, 0.0} : CVec{0.0, 1.0};
    std::vector<cplx> H(7);
    for (int k = -3; k <= 3; ++k) {
        const CVec xp = x + e * (k * step);
        const CVec ratio = cdiv(x, xp);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < pn.y.size(); ++j) {
            const CVec& y = pn.y[j];
            const cplx om = w(ratio, -y);
            if (om == 0.0) continue;
            acc += pn.w[j] / y.modulus2() * om * u(cdiv(x, y));
        }
        H[k + 3] = x.modulus2() / xp.modulus2() * acc;
    }
    const auto sw = stencil_weights(n, step);
    std::vector<cplx> c(n + 1);
    for (int s = 0; s <= n; ++s) {
        const int d = n - s;
        cplx deriv = 0.0;
        for (int k = 0; k < 7; ++k) deriv += sw[d][k] * H[k];
        c[s] = binomial(n, s) * (kTwoPi / cM) * std::pow(-kI, d) * deriv;
    }
    return c;
}

ClosedFormOperator quantize_separable_kernel(const WeightPFT& w, const SymbolFn& u, int axis, int n, double h) {
    check_axis(axis);
    ClosedFormOperator op;
    op.name = "separable-kernel";
    auto wp = std::make_shared<WeightPFT>(w);
    for (int s = 0; s <= n; ++s) {
        SymbolFn cs = [wp, u, axis, n, h, s](const CVec& x) {
            return separable_kernel_coefficients(*wp, u, axis, n, x, h)[s];
        };
        op.terms.push_back(term(1.0, cs, "c_" + std::to_string(s), P(s == 0 ? 0 : axis, s)));
    }
    return op;
}

ClosedFormOperator inversion_quantize_separable(const SymbolFn& u, int axis, int n, double h) {
    check_axis(axis);
    if (n < 0 || n > 4) throw Error(ErrorKind::BadRange, "separable order n must lie in [0, 4]");
    ClosedFormOperator op;
    op.name = "inversion-separable";
    const CVec e = axis == 1 ? CVec{1.0, 0.0} : CVec{0.0, 1.0};
    for (int s = 0; s <= n; ++s) {
        const int d = n - s;
        SymbolFn cs = [u, e, d, h, n, s](const CVec& x) {
            const double step = h * 20.0 * x.modulus();
            const auto sw = stencil_weights(d, step);
            cplx deriv = 0.0;
            for (int k = -3; k <= 3; ++k) {
                const CVec xp = x + e * (k * step);
                deriv += sw[d][k + 3] * u(diagonal_root(x, xp));
            }
            return binomial(n, s) * std::pow(-kI, d) * deriv;
        };
        op.terms.push_back(term(1.0, cs, "c_" + std::to_string(s), P(s == 0 ? 0 : axis, s)));
    }
    return op;
}

ClosedFormOperator quantize_observable(const WeightPFT& w, const ObservableSpec& spec, bool legacy_6_28) {
    using K = ObservableSpec::Kind;
    ClosedFormOperator op;
    op.name = spec.text.empty() ? "observable" : spec.text;
    if (spec.kind == K::One) {
        op.terms.push_back(term(1.0, {}, "1"));
        return op;
    }
    if (spec.kind == K::SampledF)
        throw Error(ErrorKind::BadRange, "a sampled symbol has no closed form; use quantize_kernel");
    if (spec.kind == K::PowerQ) {
        const cplx ratio = omega(w, spec.beta, 0, 0, {1.0, 0.0}) / omega(w, 0.0, 0, 0, {1.0, 0.0});
        op.terms.push_back(term(ratio, power_symbol(spec.beta), "Q^" + std::to_string(spec.beta)));
        op.coefficients.push_back({"ratio", ratio});
        return op;
    }
    if (spec.kind == K::SeparableUPn) {
        const SymbolFn u = power_symbol(spec.beta);
        ClosedFormOperator sep = w.kind == WeightKind::Inversion ? inversion_quantize_separable(u, spec.axis, spec.n)
                                                                  : quantize_separable_kernel(w, u, spec.axis, spec.n);
        sep.name = op.name;
        return sep;
    }

    const OmegaTable t = omega_table(w);
    const cplx Om = t.omega0;
    const cplx G1 = t.grad0[0] / Om, G2 = t.grad0[1] / Om;
    const cplx L = t.lap0 / Om;
    const cplx s = kTwoPi / t.c_M;
    op.coefficients.push_back({"G1", G1});
    op.coefficients.push_back({"G2", G2});
    op.coefficients.push_back({"lap_over_omega", L});

    switch (spec.kind) {
        case K::PositionVec: {
            check_axis(spec.axis);
            // (Omega_210 Q1 + Omega_201 Q2, Omega_210 Q2 - Omega_201 Q1)
            const cplx a = s * t.omega_210, b = s * t.omega_201;
            if (spec.axis == 1) {
                op.terms.push_back(term(a, coordinate(1), "Q1"));
                op.terms.push_back(term(b, coordinate(2), "Q2"));
            } else {
                op.terms.push_back(term(a, coordinate(2), "Q2"));
                op.terms.push_back(term(-b, coordinate(1), "Q1"));
            }
            op.coefficients.push_back({"omega_210", t.omega_210});
            op.coefficients.push_back({"omega_201", t.omega_201});
            break;
        }
        case K::Momentum: {
            check_axis(spec.axis);
            // P + (i / Q*)(2 e1 + grad Omega / Omega)
            op.terms.push_back(term(1.0, {}, "P" + std::to_string(spec.axis), P(spec.axis)));
            op.terms.push_back(term(kI, rotated_over_q(2.0 + G1, G2, spec.axis), "[(2+G)/Q*]"));
            op.coefficients.push_back({"bracket1", 2.0 + G1});
            op.coefficients.push_back({"bracket2", G2});
            break;
        }
        case K::KineticP2: {
            op.terms.push_back(term(1.0, {}, "P^2", Deriv{0, 0, true}));
            for (int l = 1; l <= 2; ++l)
                op.terms.push_back(term(2.0 * kI, rotated_over_q(2.0 + G1, G2, l), "[Q(2+G)/Q^2]", P(l)));
            const cplx k = -(4.0 + 4.0 * G1 + L);
            op.terms.push_back(term(k, inv_q2(), "1/Q^2"));
            op.coefficients.push_back({"K", k});
            op.coefficients.push_back({"bracket1", 2.0 + G1});
            op.coefficients.push_back({"bracket2", G2});
            break;
        }
        case K::Dilation: {
            // Omega_210 (Q.P + 2i) -/+ Omega_201 Q x P + i (d1 Omega_210 - d2 Omega_201)
            const cplx a = s * t.omega_210;
            const cplx b = (legacy_6_28 ? 1.0 : -1.0) * s * t.omega_201;
            op.terms.push_back(term(a, coordinate(1), "Q1 P1", P(1)));
            op.terms.push_back(term(a, coordinate(2), "Q2 P2", P(2)));
            op.terms.push_back(term(b, coordinate(1), "Q1 P2", P(2)));
            op.terms.push_back(term(-b, coordinate(2), "Q2 P1", P(1)));
            const cplx c = s * (2.0 * kI * t.omega_210 + kI * (t.grad_210[0] - t.grad_201[1]));
            op.terms.push_back(term(c, {}, "const"));
            op.coefficients.push_back({"QdotP", a});
            op.coefficients.push_back({"QcrossP", b});
            op.coefficients.push_back({"const", c});
            break;
        }
        case K::AngularMomentum: {
            // Omega_210 Q x P + Omega_201 (Q.P + 2i) + i (d1 Omega_201 + d2 Omega_210)
            const cplx a = s * t.omega_210, b = s * t.omega_201;
            op.terms.push_back(term(a, coordinate(1), "Q1 P2", P(2)));
            op.terms.push_back(term(-a, coordinate(2), "Q2 P1", P(1)));
            op.terms.push_back(term(b, coordinate(1), "Q1 P1", P(1)));
            op.terms.push_back(term(b, coordinate(2), "Q2 P2", P(2)));
            const cplx c = s * (2.0 * kI * t.omega_201 + kI * (t.grad_201[0] + t.grad_210[1]));
            op.terms.push_back(term(c, {}, "const"));
            op.coefficients.push_back({"QcrossP", a});
            op.coefficients.push_back({"QdotP", b});
            op.coefficients.push_back({"const", c});
            break;
        }
        default:
            throw Error(ErrorKind::BadRange, "unhandled observable");
    }
    return op;
}

cplx quantize_kernel_entry(const WeightPFT& w, const FhatFn& fhat, const CVec& x, const CVec& xp, double cM) {
    static const PlaneNodes pn = plane_nodes(1e-3, 1e2, 8, 0.5, 32);
    const CVec ratio = cdiv(x, xp);
    const CVec shift = xp - x;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < pn.y.size(); ++j) {
        const CVec& q = pn.y[j];
        const cplx om = w(ratio, -q);
        if (om == 0.0) continue;
        acc += pn.w[j] / q.modulus2() * om * fhat(cdiv(x, q), shift);
    }
    return x.modulus2() / xp.modulus2() * acc / cM;
}

OperatorKernel quantize_kernel(const WeightPFT& w, const ObservableSpec& spec, GridPtr grid) {
    using K = ObservableSpec::Kind;
    if (!grid) grid = kernel_grid();
    OperatorKernel A(grid);
    const std::size_t N = A.n();
    if (spec.kind == K::One) {
        for (std::size_t i = 0; i < N; ++i) A.at(i, i) = 1.0 / grid->weight(i);
        return A;
    }
    if (w.distributional) throw Error(ErrorKind::DistributionalWeight, "use inversion_quantize");
    const double cM = c_M(w);
    if (spec.kind == K::PowerQ || spec.kind == K::PositionVec) {
        // f_hat = 2 pi u(q) delta(y): the kernel is diagonal with
        // (2 pi / c_M) int d^2q q^-2 omega_hat(1, -q) u(x/q).
        SymbolFn u = spec.kind == K::PowerQ ? power_symbol(spec.beta) : coordinate(spec.axis);
        const PlaneNodes pn = plane_nodes(w.y_min, w.y_max, 12, 0.5, 64);
        std::vector<cplx> W(pn.y.size());
        for (std::size_t j = 0; j < pn.y.size(); ++j) W[j] = pn.w[j] / pn.y[j].modulus2() * w({1.0, 0.0}, -pn.y[j]);
        parallel_for(N, [&](std::size_t i) {
            const CVec x = grid->node(i);
            cplx acc = 0.0;
            for (std::size_t j = 0; j < W.size(); ++j)
                if (W[j] != 0.0) acc += W[j] * u(cdiv(x, pn.y[j]));
            A.at(i, i) = kTwoPi / cM * acc / grid->weight(i);
        });
        return A;
    }
    if (spec.kind != K::SampledF || !spec.fhat)
        throw Error(ErrorKind::BadRange, "quantize_kernel takes One, PowerQ, PositionVec or SampledF");
    parallel_for(N, [&](std::size_t i) {
        const CVec x = grid->node(i);
        for (std::size_t j = 0; j < N; ++j) A.at(i, j) = quantize_kernel_entry(w, spec.fhat, x, grid->node(j), cM);
    });
    return A;
}

OperatorKernel inversion_quantize(const FhatFn& fhat, GridPtr grid) {
    if (!grid) grid = kernel_grid();
    OperatorKernel A(grid);
    const std::size_t N = A.n();
    parallel_for(N, [&](std::size_t i) {
        const CVec x = grid->node(i);
        for (std::size_t j = 0; j < N; ++j) {
            const CVec xp = grid->node(j);
            A.at(i, j) = fhat(diagonal_root(x, xp), xp - x) / kTwoPi;
        }
    });
    return A;
}

Field fourier_multiplier(const Field& phi, const std::function<cplx(const CVec&)>& v, GridPtr pgrid) {
    Field hat = fourier2d(phi, -1, pgrid);
    for (std::size_t i = 0; i < hat.size(); ++i) hat.v[i] *= v(hat.grid->node(i));
    return fourier2d(hat, +1, phi.grid);
}

Field apply_operator(const OperatorKernel& A, const Field& phi) { return A.apply(phi); }

Field apply_operator(const ClosedFormOperator& A, const Field& phi) { return A.apply(phi); }

Eigen::MatrixXcd to_basis_matrix(const FieldOp& A, double alpha, int n_max, int m_max, GridPtr grid) {
    if (n_max < 0 || m_max < 0) throw Error(ErrorKind::BadRange, "basis cutoffs must be non-negative");
    if (!grid) grid = default_grid();
    const int nm = 2 * m_max + 1;
    const int dim = (n_max + 1) * nm;
    std::vector<Field> basis, images;
    for (int n = 0; n <= n_max; ++n)
        for (int m = -m_max; m <= m_max; ++m) basis.push_back(basis_eval({n, m, alpha}, grid));
    for (const Field& b : basis) images.push_back(A(b));
    Eigen::MatrixXcd M(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) M(a, b) = inner(basis[a], images[b]);
    return M;
}

}  // namespace simquant
