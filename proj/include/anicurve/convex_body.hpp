// Support-function geometry of axisymmetric convex bodies.
//
// In the orthonormal frame (e_theta, e_phi) the matrix W_u = Hess u + u I is
// diagonal with b11 = u'' + u and b22 = u' cot(theta) + u; its entries are
// the principal radii of curvature.
#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/sphere_calculus.hpp"

namespace anicurve {

/// Support function of a convex body that contains the origin (u > 0).
class SupportField {
public:
    explicit SupportField(ScalarField u) : u_(std::move(u)) {
        for (double v : u_.values()) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw std::domain_error("support function must be positive and finite (origin not enclosed)");
            }
        }
    }
    [[nodiscard]] const ScalarField& field() const { return u_; }
    [[nodiscard]] const Grid& grid() const { return u_.grid(); }
    [[nodiscard]] int size() const { return u_.size(); }
    double operator[](int i) const { return u_[i]; }

private:
    ScalarField u_;
};

/// Radial function of a star-shaped body about the origin (r > 0).
class RadialField {
public:
    explicit RadialField(ScalarField r) : r_(std::move(r)) {
        for (double v : r_.values()) {
            if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("radial function must be positive");
        }
    }
    [[nodiscard]] const ScalarField& field() const { return r_; }
    [[nodiscard]] const Grid& grid() const { return r_.grid(); }
    [[nodiscard]] int size() const { return r_.size(); }
    double operator[](int i) const { return r_[i]; }

private:
    ScalarField r_;
};

struct CurvatureMatrix {
    ScalarField b11;  // meridian radius u'' + u
    ScalarField b22;  // parallel radius u' cot(theta) + u
};

struct BodyGeometry {
    CurvatureMatrix W;
    ScalarField lambda1;
    ScalarField lambda2;
    ScalarField sigma1;
    ScalarField sigma2;
    double convexity_margin;
};

/// W_g for any even C^2 field g; the support function need not be convex.
inline CurvatureMatrix curvature_matrix(const ScalarField& g) {
    const ScalarField d1 = differentiate(g, 1, Parity::even);
    const ScalarField d2 = differentiate(g, 2, Parity::even);
    const auto cot = g.grid().cot_theta();
    CurvatureMatrix W{ScalarField(g.grid()), ScalarField(g.grid())};
    for (int i = 0; i < g.size(); ++i) {
        W.b11[i] = d2[i] + g[i];
        W.b22[i] = d1[i] * cot[i] + g[i];
    }
    return W;
}

inline CurvatureMatrix curvature_matrix(const SupportField& u) { return curvature_matrix(u.field()); }

inline void check_sigma_order(int k) {
    if (k != 1 && k != 2) throw std::invalid_argument("sigma_k order must be 1 or 2 on S^2");
}

inline ScalarField sigma_k(const CurvatureMatrix& W, int k) {
    check_sigma_order(k);
    ScalarField out(W.b11.grid());
    for (int i = 0; i < out.size(); ++i) out[i] = (k == 1) ? W.b11[i] + W.b22[i] : W.b11[i] * W.b22[i];
    return out;
}

/// min over nodes of the smaller principal radius; > 0 iff uniformly convex.
inline double convexity_margin(const CurvatureMatrix& W) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < W.b11.size(); ++i) m = std::min({m, W.b11[i], W.b22[i]});
    return m;
}

inline double convexity_margin(const ScalarField& u) { return convexity_margin(curvature_matrix(u)); }
inline double convexity_margin(const SupportField& u) { return convexity_margin(u.field()); }

inline BodyGeometry body_geometry(const SupportField& u) {
    CurvatureMatrix W = curvature_matrix(u);
    ScalarField s1 = sigma_k(W, 1);
    ScalarField s2 = sigma_k(W, 2);
    const double margin = convexity_margin(W);
    ScalarField l1 = W.b11;
    ScalarField l2 = W.b22;
    return {std::move(W), std::move(l1), std::move(l2), std::move(s1), std::move(s2), margin};
}

/// Polarized sigma_k of diagonal 2x2 matrices, node-wise.
inline ScalarField polarized_sigma(std::span<const CurvatureMatrix> Ws) {
    const int k = static_cast<int>(Ws.size());
    check_sigma_order(k);
    if (k == 1) return sigma_k(Ws[0], 1);
    const CurvatureMatrix& A = Ws[0];
    const CurvatureMatrix& B = Ws[1];
    ScalarField out(A.b11.grid());
    // (tr A tr B - tr AB) / 2 for diagonal A, B
    for (int i = 0; i < out.size(); ++i) out[i] = 0.5 * (A.b11[i] * B.b22[i] + A.b22[i] * B.b11[i]);
    return out;
}

/// V_{k+1}(v, u^1, ..., u^k) = integral of v sigma_k[W_{u^1}, ..., W_{u^k}].
inline double mixed_volume(const ScalarField& v, std::span<const ScalarField> us, int k) {
    check_sigma_order(k);
    if (static_cast<int>(us.size()) != k) {
        throw std::invalid_argument("mixed_volume needs exactly k support functions after the first slot");
    }
    std::vector<CurvatureMatrix> Ws;
    Ws.reserve(us.size());
    for (const ScalarField& u : us) Ws.push_back(curvature_matrix(u));
    return integrate(v * polarized_sigma(Ws));
}

inline double mixed_volume(const ScalarField& v, std::initializer_list<ScalarField> us, int k) {
    const std::vector<ScalarField> list(us);
    return mixed_volume(v, std::span<const ScalarField>(list), k);
}

/// V_{k+1}(u, ..., u) = integral of u sigma_k(W_u).
inline double quermass_volume(const ScalarField& u, int k) {
    return integrate(u * sigma_k(curvature_matrix(u), k));
}

inline void require_convex(const ScalarField& u, const char* what) {
    if (!(convexity_margin(u) > 0.0)) {
        throw std::domain_error(std::string(what) + ": body is not uniformly convex");
    }
}

/// Rescales u so that the integral of u sigma_k(W_u) equals |S^2|.
inline SupportField normalize_tilde(const SupportField& u, int k) {
    check_sigma_order(k);
    require_convex(u.field(), "normalize_tilde");
    const double V = quermass_volume(u.field(), k);
    const double s = std::pow(kSphereArea / V, 1.0 / (k + 1));
    return SupportField(s * u.field());
}

namespace detail {

// Samples of an even field on the full meridian circle s = j h,
// j = -(N+1) .. N+1, with the pole values at j = 0 and |j| = N+1.
inline std::vector<double> circle_samples(const ScalarField& g) {
    const int n = g.size();
    const auto [north, south] = pole_values(g);
    std::vector<double> c(2 * static_cast<std::size_t>(n + 1) + 1);
    const int off = n + 1;
    c[off] = north;
    c[0] = south;
    c[2 * off] = south;
    for (int i = 0; i < n; ++i) {
        c[off + i + 1] = g[i];
        c[off - i - 1] = g[i];
    }
    return c;
}

// Extremum of F(s) = a(s) / cos(s - target) (minimize) or a(s) cos(s - target)
// (maximize) over the circle samples, refined by a parabola through the best
// sample and its neighbours.
inline double circle_extremum(const std::vector<double>& a, double h, double target, bool minimize) {
    const int m = static_cast<int>(a.size());
    const int off = (m - 1) / 2;
    auto value = [&](int j, bool& ok) {
        const double c = std::cos(h * static_cast<double>(j - off) - target);
        ok = c > 1e-12;
        if (!ok) return 0.0;
        return minimize ? a[j] / c : a[j] * c;
    };
    int best = -1;
    double best_v = 0.0;
    for (int j = 0; j < m; ++j) {
        bool ok = false;
        const double v = value(j, ok);
        if (!ok) continue;
        if (best < 0 || (minimize ? v < best_v : v > best_v)) {
            best = j;
            best_v = v;
        }
    }
    if (best < 0) throw std::domain_error("no admissible direction in extremum search");
    if (best == 0 || best == m - 1) return best_v;
    bool okm = false, okp = false;
    const double fm = value(best - 1, okm);
    const double fp = value(best + 1, okp);
    if (!okm || !okp) return best_v;
    const double curv = fm - 2.0 * best_v + fp;
    if (minimize ? curv <= 0.0 : curv >= 0.0) return best_v;
    return best_v - (fm - fp) * (fm - fp) / (8.0 * curv);
}

}  // namespace detail

/// Radial function in a single direction theta from a support function.
inline double radial_at(const SupportField& u, double theta) {
    return detail::circle_extremum(detail::circle_samples(u.field()), u.grid().h(), theta, true);
}

/// r(z) = min over directions x with <x,z> > 0 of u(x) / <x,z>.
inline RadialField radial_from_support(const SupportField& u) {
    const auto samples = detail::circle_samples(u.field());
    if (samples[(samples.size() - 1) / 2] <= 0.0 || samples.front() <= 0.0) {
        throw std::domain_error("radial_from_support: origin not enclosed");
    }
    ScalarField r(u.grid());
    for (int i = 0; i < r.size(); ++i) {
        r[i] = detail::circle_extremum(samples, u.grid().h(), u.grid().theta(i), true);
    }
    return RadialField(std::move(r));
}

inline double support_at(const RadialField& r, double theta) {
    return detail::circle_extremum(detail::circle_samples(r.field()), r.grid().h(), theta, false);
}

/// u(x) = max over directions z of r(z) <x,z>. A non-convex star body yields
/// the support function of its convex hull.
inline SupportField support_from_radial(const RadialField& r) {
    const auto samples = detail::circle_samples(r.field());
    ScalarField u(r.grid());
    for (int i = 0; i < u.size(); ++i) {
        u[i] = detail::circle_extremum(samples, r.grid().h(), r.grid().theta(i), false);
    }
    return SupportField(std::move(u));
}

/// Polar body: r* = 1/u.
inline RadialField dual_body(const SupportField& u) {
    return RadialField(u.field().map([](double x) { return 1.0 / x; }));
}

struct ProfilePoint {
    double rho;
    double z;
};

/// Meridian profile of the hypersurface X = u x + grad u.
inline std::vector<ProfilePoint> embed(const SupportField& u) {
    const ScalarField du = differentiate(u.field(), 1, Parity::even);
    const auto s = u.grid().sin_theta();
    const auto c = u.grid().cos_theta();
    std::vector<ProfilePoint> out(u.size());
    for (int i = 0; i < u.size(); ++i) {
        out[i] = {u[i] * s[i] + du[i] * c[i], u[i] * c[i] - du[i] * s[i]};
    }
    return out;
}

/// Spheroid with equatorial semi-axis a and polar semi-axis b.
inline SupportField spheroid_support(const Grid& grid, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("spheroid semi-axes must be positive");
    return SupportField(ScalarField::sample(grid, [a, b](double t) {
        const double s = std::sin(t), c = std::cos(t);
        return std::sqrt(a * a * s * s + b * b * c * c);
    }));
}

/// Ball of radius r centred at (0, 0, eps).
inline SupportField translated_ball(const Grid& grid, double r, double eps) {
    return SupportField(ScalarField::sample(grid, [r, eps](double t) { return r + eps * std::cos(t); }));
}

}  // namespace anicurve
