// Scalar functionals of a convex body under the speed f u^alpha sigma_k^beta:
// rho, Z_p, eta, the entropy-type functional J, and the admissibility test
// for the anisotropy f.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/sphere_calculus.hpp"

namespace anicurve {

/// Positive axisymmetric weight f(theta) on directions.
class Anisotropy {
public:
    enum class Kind { constant, power_of_linear, tabulated };

    static Anisotropy constant(double value = 1.0) {
        if (!(value > 0.0)) throw std::invalid_argument("anisotropy must be positive");
        Anisotropy a;
        a.kind_ = Kind::constant;
        a.c_ = value;
        return a;
    }

    /// f = (1 + eps cos theta)^s.
    static Anisotropy power_of_linear(double eps, double s) {
        if (!(std::abs(eps) < 1.0)) throw std::invalid_argument("power-of-linear anisotropy needs |eps| < 1");
        Anisotropy a;
        a.kind_ = Kind::power_of_linear;
        a.eps_ = eps;
        a.s_ = s;
        return a;
    }

    /// Piecewise-linear interpolation of (theta, f) samples, clamped at the ends.
    static Anisotropy tabulated(std::vector<double> theta, std::vector<double> values) {
        if (theta.size() != values.size() || theta.size() < 2) {
            throw std::invalid_argument("tabulated anisotropy needs matching theta/value columns (>= 2 rows)");
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
                throw std::invalid_argument("tabulated anisotropy must be positive");
            }
            if (i > 0 && !(theta[i] > theta[i - 1])) {
                throw std::invalid_argument("tabulated anisotropy theta must be strictly increasing");
            }
        }
        Anisotropy a;
        a.kind_ = Kind::tabulated;
        a.theta_ = std::move(theta);
        a.values_ = std::move(values);
        return a;
    }

    static Anisotropy from_field(const ScalarField& f) {
        return tabulated(std::vector<double>(f.grid().thetas().begin(), f.grid().thetas().end()),
                         std::vector<double>(f.values().begin(), f.values().end()));
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_unit() const { return kind_ == Kind::constant && c_ == 1.0; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] double exponent() const { return s_; }
    [[nodiscard]] double constant_value() const { return c_; }

    double operator()(double theta) const {
        switch (kind_) {
        case Kind::constant:
            return c_;
        case Kind::power_of_linear:
            return std::pow(1.0 + eps_ * std::cos(theta), s_);
        case Kind::tabulated:
            break;
        }
        if (theta <= theta_.front()) return values_.front();
        if (theta >= theta_.back()) return values_.back();
        const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
        const std::size_t j = static_cast<std::size_t>(it - theta_.begin());
        const double w = (theta - theta_[j - 1]) / (theta_[j] - theta_[j - 1]);
        return (1.0 - w) * values_[j - 1] + w * values_[j];
    }

    [[nodiscard]] ScalarField on(const Grid& grid) const {
        return ScalarField::sample(grid, [this](double t) { return (*this)(t); });
    }

    [[nodiscard]] std::string describe() const {
        switch (kind_) {
        case Kind::constant:
            return "constant " + std::to_string(c_);
        case Kind::power_of_linear:
            return "power_linear eps=" + std::to_string(eps_) + " s=" + std::to_string(s_);
        case Kind::tabulated:
            return "tabulated (" + std::to_string(theta_.size()) + " rows)";
        }
        return {};
    }

private:
    Kind kind_ = Kind::constant;
    double c_ = 1.0;
    double eps_ = 0.0;
    double s_ = 1.0;
    std::vector<double> theta_, values_;
};

enum class Regime { subcritical, critical, supercritical };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::subcritical:
        return "subcritical";
    case Regime::critical:
        return "critical";
    case Regime::supercritical:
        return "supercritical";
    }
    return "?";
}

inline double binomial_2(int k) { return k == 1 ? 2.0 : 1.0; }

/// (k, beta, alpha, f) on S^2 with gamma = sigma_k(1,1)^beta and q = alpha + k beta - 1.
struct FlowParams {
    int k = 1;
    double beta = 1.0;
    double alpha = 0.0;
    Anisotropy f = Anisotropy::constant();

    /// Enforces beta > 1/k.
    static FlowParams make(int k, double beta, double alpha, Anisotropy f = Anisotropy::constant()) {
        check_sigma_order(k);
        if (!(beta > 1.0 / k)) {
            throw std::invalid_argument("beta must exceed 1/k (got beta=" + std::to_string(beta) +
                                        ", k=" + std::to_string(k) + ")");
        }
        return FlowParams{k, beta, alpha, std::move(f)};
    }

    /// Only beta > 0; for closed-form checks at beta <= 1/k, where the flow is
    /// still parabolic but outside the convergence theory.
    static FlowParams unchecked(int k, double beta, double alpha, Anisotropy f = Anisotropy::constant()) {
        check_sigma_order(k);
        if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
        return FlowParams{k, beta, alpha, std::move(f)};
    }

    [[nodiscard]] double gamma() const { return std::pow(binomial_2(k), beta); }
    [[nodiscard]] double q() const { return alpha + k * beta - 1.0; }
    [[nodiscard]] Regime regime() const {
        const double d = q();
        if (std::abs(d) <= 1e-12) return Regime::critical;
        return d < 0.0 ? Regime::subcritical : Regime::supercritical;
    }
};

namespace detail {

inline ScalarField rho_from(const ScalarField& u, const ScalarField& sk, const ScalarField& f, const FlowParams& p) {
    ScalarField out(u.grid());
    for (int i = 0; i < u.size(); ++i) {
        if (!(sk[i] > 0.0)) throw std::domain_error("sigma_k not positive: body left the admissible cone");
        out[i] = f[i] * std::pow(u[i], p.alpha - 1.0) * std::pow(sk[i], p.beta);
    }
    return out;
}

}  // namespace detail

/// rho = f u^(alpha-1) sigma_k^beta.
inline ScalarField rho_field(const SupportField& u, const FlowParams& p) {
    require_convex(u.field(), "rho_field");
    const ScalarField sk = sigma_k(curvature_matrix(u), p.k);
    return detail::rho_from(u.field(), sk, p.f.on(u.grid()), p);
}

/// Z_p = integral of u sigma_k rho^p.
inline double Z_p(const SupportField& u, const FlowParams& p, double expP) {
    require_convex(u.field(), "Z_p");
    const ScalarField sk = sigma_k(curvature_matrix(u), p.k);
    const ScalarField rho = detail::rho_from(u.field(), sk, p.f.on(u.grid()), p);
    ScalarField g(u.grid());
    for (int i = 0; i < g.size(); ++i) g[i] = u[i] * sk[i] * std::pow(rho[i], expP);
    return integrate(g);
}

inline double eta(const SupportField& u, const FlowParams& p) { return Z_p(u, p, 1.0) / kSphereArea; }

inline double J_functional(const SupportField& u, const FlowParams& p) { return Z_p(u, p, -1.0 / p.beta); }

/// Smallest eigenvalue over nodes of Hess g + g I with g = f^(1/(1+k beta-alpha)).
inline double check_f_condition(const Grid& grid, const FlowParams& p) {
    const double e = 1.0 + p.k * p.beta - p.alpha;
    if (!(e > 0.0)) throw std::invalid_argument("anisotropy condition needs 1 + k beta - alpha > 0");
    const ScalarField g = p.f.on(grid).map([e](double x) { return std::pow(x, 1.0 / e); });
    return convexity_margin(g);
}

/// V(v,u,..)^2 - V(v,v,u,..) V(u,u,..); non-negative by Alexandrov-Fenchel.
inline double af_margin(const SupportField& v, const SupportField& u, int k) {
    check_sigma_order(k);
    require_convex(v.field(), "af_margin");
    require_convex(u.field(), "af_margin");
    const ScalarField& a = v.field();
    const ScalarField& b = u.field();
    if (k == 1) {
        const double vu = mixed_volume(a, {b}, 1);
        return vu * vu - mixed_volume(a, {a}, 1) * mixed_volume(b, {b}, 1);
    }
    const double vuu = mixed_volume(a, {b, b}, 2);
    return vuu * vuu - mixed_volume(a, {a, b}, 2) * mixed_volume(b, {b, b}, 2);
}

/// Exponents recorded for Z_p by default: -1/beta, 1 - 1/beta, 1, 2.
inline std::vector<double> default_z_exponents(const FlowParams& p) {
    return {-1.0 / p.beta, 1.0 - 1.0 / p.beta, 1.0, 2.0};
}

struct DiagnosticsRecord {
    double t = 0.0;
    double tau = 0.0;
    double R = 0.0;
    double eta = 0.0;
    double J = 0.0;
    std::vector<double> Z;  // aligned with the configured exponent list
    double umin = 0.0;
    double umax = 0.0;
    double gradmax = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double Q_min = 0.0;
    double Q_max = 0.0;
};

/// All per-record scalars for a convex support function.
inline DiagnosticsRecord diagnose(const SupportField& u, const FlowParams& p, std::span<const double> z_exponents,
                                  double t, double tau) {
    const CurvatureMatrix W = curvature_matrix(u);
    if (!(convexity_margin(W) > 0.0)) throw std::domain_error("diagnose: body is not uniformly convex");
    const ScalarField sk = sigma_k(W, p.k);
    const ScalarField rho = detail::rho_from(u.field(), sk, p.f.on(u.grid()), p);
    const ScalarField du = differentiate(u.field(), 1, Parity::even);

    auto z_of = [&](double e) {
        ScalarField g(u.grid());
        for (int i = 0; i < g.size(); ++i) g[i] = u[i] * sk[i] * std::pow(rho[i], e);
        return integrate(g);
    };

    DiagnosticsRecord d;
    d.t = t;
    d.tau = tau;
    const Extrema ue = extrema(u.field());
    d.umin = ue.min;
    d.umax = ue.max;
    d.R = ue.max / ue.min;
    d.eta = z_of(1.0) / kSphereArea;
    d.J = z_of(-1.0 / p.beta);
    for (double e : z_exponents) d.Z.push_back(z_of(e));
    d.gradmax = 0.0;
    for (int i = 0; i < u.size(); ++i) d.gradmax = std::max(d.gradmax, std::abs(du[i]) / u[i]);
    const Extrema e1 = extrema(W.b11), e2 = extrema(W.b22);
    d.lambda_min = std::min(e1.min, e2.min);
    d.lambda_max = std::max(e1.max, e2.max);
    const Extrema qe = extrema(rho);
    d.Q_min = qe.min;
    d.Q_max = qe.max;
    return d;
}

}  // namespace anicurve
