// Pinching construction for the supercritical flows: a radial graph
// z = psi(rho, t) that moves up toward the origin as t -> 0-, pointwise
// checks of its speed bounds, and the ratio-blowup A/B experiment.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/flow_engine.hpp"
#include "anicurve/functionals.hpp"

namespace anicurve {

/// Exponents of the sub-solution for the dual flow dr/dt = -r^alpha_hat sigma_k^beta(W_{1/r}).
struct SubsolutionParams {
    double alpha = 0.0;
    int k = 1;
    double beta = 1.0;
    double alpha_hat = 2.0;  // 2 - alpha
    double q = 0.0;          // k beta + 1 - alpha_hat
    double theta = 0.0;      // > 1/q
    double mu = 0.0;         // (q theta - 1) / (k beta theta), in (0, 1)
    double a = 1.0;          // speed multiplier

    static SubsolutionParams make(double alpha, int k, double beta, double theta, double a = 1.0) {
        check_sigma_order(k);
        if (!(beta > 0.0)) throw std::invalid_argument("sub-solution needs beta > 0");
        if (!(a > 0.0)) throw std::invalid_argument("sub-solution speed multiplier must be positive");
        SubsolutionParams sp;
        sp.alpha = alpha;
        sp.k = k;
        sp.beta = beta;
        sp.alpha_hat = 2.0 - alpha;
        sp.q = k * beta + 1.0 - sp.alpha_hat;
        sp.a = a;
        if (!(sp.q > 0.0)) throw std::domain_error("sub-solution needs q = k beta + alpha - 1 > 0");
        if (!(theta > 1.0 / sp.q)) {
            throw std::domain_error("sub-solution needs theta > 1/q (theta=" + std::to_string(theta) +
                                    ", q=" + std::to_string(sp.q) + ")");
        }
        sp.theta = theta;
        sp.mu = (sp.q * theta - 1.0) / (k * beta * theta);
        if (!(sp.mu < 1.0)) throw std::domain_error("sub-solution needs mu < 1 for a convex outer branch");
        return sp;
    }
};

/// psi together with its rho- and t-derivatives.
struct PsiJet {
    double value;
    double d_rho;
    double d_rho2;
    double d_t;
    bool inner;  // rho < |t|^theta
};

inline PsiJet subsolution_jet(double rho, double t, const SubsolutionParams& sp) {
    if (!(t > -1.0 && t < 0.0)) throw std::domain_error("sub-solution time must lie in (-1, 0)");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("sub-solution rho must lie in [0, 1]");
    const double s = -t;
    const double th = sp.theta, mu = sp.mu;
    const double st = std::pow(s, th);
    PsiJet j{};
    j.inner = rho < st;
    if (j.inner) {
        const double c = std::pow(s, th * (mu - 1.0));
        j.value = -st + c * rho * rho;
        j.d_rho = 2.0 * c * rho;
        j.d_rho2 = 2.0 * c;
        j.d_t = th * std::pow(s, th - 1.0) + th * (1.0 - mu) * std::pow(s, th * (mu - 1.0) - 1.0) * rho * rho;
    } else {
        const double rm = std::pow(rho, mu);
        j.value = -st - (1.0 - mu) / (1.0 + mu) * std::pow(s, th * (1.0 + mu)) + 2.0 / (1.0 + mu) * rho * rm;
        j.d_rho = 2.0 * rm;
        j.d_rho2 = 2.0 * mu * std::pow(rho, mu - 1.0);
        j.d_t = th * std::pow(s, th - 1.0) + (1.0 - mu) * th * std::pow(s, th * (1.0 + mu) - 1.0);
    }
    return j;
}

/// Height of the graph at radius rho and time t; C^1 across rho = |t|^theta.
inline double subsolution_psi(double rho, double t, const SubsolutionParams& sp) {
    return subsolution_jet(rho, t, sp).value;
}

struct GraphRadii {
    double lambda_r;  // meridian
    double lambda_t;  // parallel
};

/// Principal radii of curvature of the surface of revolution z = psi(rho).
inline GraphRadii graph_radii(const SubsolutionParams& sp, double rho, double t) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("graph_radii needs rho in (0, 1]");
    const PsiJet j = subsolution_jet(rho, t, sp);
    if (!(j.d_rho2 > 0.0) || !(j.d_rho > 0.0)) throw std::domain_error("graph is not strictly convex at this point");
    const double w = std::sqrt(1.0 + j.d_rho * j.d_rho);
    return {w * w * w / j.d_rho2, rho * w / j.d_rho};
}

struct DualRadii {
    double b11;
    double b22;
};

/// Eigenvalues of W_{1/r} for the graph viewed as a radial function about
/// the origin, the polar angle measured from the downward axis.
inline DualRadii dual_radii(const SubsolutionParams& sp, double rho, double t) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("dual_radii needs rho in (0, 1]");
    const PsiJet j = subsolution_jet(rho, t, sp);
    const double z = j.value, z1 = j.d_rho, z2 = j.d_rho2;
    const double r = std::hypot(rho, z);
    const double r1 = (rho + z * z1) / r;
    const double r2 = (1.0 + z1 * z1 + z * z2 - r1 * r1) / r;
    // S = 1/r and the polar angle as functions of rho
    const double A = -r1 / (r * r);
    const double A1 = -r2 / (r * r) + 2.0 * r1 * r1 / (r * r * r);
    const double B = (rho * z1 - z) / (r * r);
    const double B1 = rho * z2 / (r * r) - 2.0 * (rho * z1 - z) * r1 / (r * r * r);
    if (!(B > 0.0)) throw std::domain_error("graph is not star-shaped about the origin at this point");
    const double angle = std::atan2(rho, -z);
    const double S = 1.0 / r;
    const double S1 = A / B;
    const double S2 = (A1 * B - A * B1) / (B * B * B);
    return {S2 + S, S1 * std::cos(angle) / std::sin(angle) + S};
}

/// Normal speed of the dual flow at a graph point: r^alpha_hat sigma_k^beta(W_{1/r}).
inline double dual_speed(const SubsolutionParams& sp, double rho, double t) {
    const DualRadii d = dual_radii(sp, rho, t);
    if (!(d.b11 > 0.0) || !(d.b22 > 0.0)) throw std::domain_error("dual matrix not positive: convexity failure");
    const double sk = sp.k == 1 ? d.b11 + d.b22 : d.b11 * d.b22;
    const double r = std::hypot(rho, subsolution_psi(rho, t, sp));
    return std::pow(r, sp.alpha_hat) * std::pow(sk, sp.beta);
}

struct BranchStats {
    int samples = 0;
    double c0 = std::numeric_limits<double>::infinity();  // min L / |t|^(theta-1)
    double T_ratio_max = 0.0;                             // max |d psi/dt| / |t|^(theta-1)
};

struct CaseBoundsReport {
    double c0_empirical = std::numeric_limits<double>::infinity();
    double T_ratio_max = 0.0;
    int samples = 0;
    BranchStats inner;
    BranchStats outer;
    std::uint64_t seed = 0;
};

/// Samples (rho, t) log-uniformly, alternating branches, with |t| in
/// [1e-3, 0.5]; inner rho in [1e-4 |t|^theta, |t|^theta), outer in [|t|^theta, 1].
inline CaseBoundsReport verify_case_bounds(const SubsolutionParams& sp, int samples, std::uint64_t seed = 0) {
    if (samples < 1) throw std::invalid_argument("verify_case_bounds needs at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };

    CaseBoundsReport rep;
    rep.seed = seed;
    for (int n = 0; n < samples; ++n) {
        const double s = log_uniform(1e-3, 0.5);
        const double st = std::pow(s, sp.theta);
        const bool inner = n % 2 == 0;
        double rho = inner ? log_uniform(1e-4 * st, st) : log_uniform(st, 1.0);
        if (inner && rho >= st) rho = std::nextafter(st, 0.0);
        const double t = -s;
        const double scale = std::pow(s, sp.theta - 1.0);
        const double L = dual_speed(sp, rho, t);
        const double T = std::abs(subsolution_jet(rho, t, sp).d_t);
        BranchStats& b = inner ? rep.inner : rep.outer;
        ++b.samples;
        b.c0 = std::min(b.c0, L / scale);
        b.T_ratio_max = std::max(b.T_ratio_max, T / scale);
    }
    rep.samples = samples;
    rep.c0_empirical = std::min(rep.inner.c0, rep.outer.c0);
    rep.T_ratio_max = std::max(rep.inner.T_ratio_max, rep.outer.T_ratio_max);
    return rep;
}

/// Prolate spheroid with equatorial semi-axis a and polar semi-axis b; R = b/a.
inline SupportField pinched_initial(const Grid& grid, double a, double b) {
    if (!(a > 0.0) || !(b >= a)) throw std::invalid_argument("pinched_initial needs 0 < a <= b");
    return spheroid_support(grid, a, b);
}

struct BlowupReport {
    bool supports_blowup = false;
    bool control_decreasing = false;
    double R_initial = 0.0;
    double R_final = 0.0;
    double control_R_final = 0.0;
    bool R_nondecreasing = false;
    Trajectory main;
    Trajectory control;

    [[nodiscard]] std::string verdict() const { return supports_blowup ? "supports blowup" : "inconclusive"; }
};

namespace detail {

inline std::vector<double> ratio_series(const Trajectory& tr) {
    std::vector<double> R;
    R.reserve(tr.diagnostics.size());
    for (const auto& d : tr.diagnostics) R.push_back(d.R);
    return R;
}

}  // namespace detail

/// Runs the normalized flow from u0 for alpha > 1 - k beta and the critical
/// control alpha' = 1 - k beta from the same body.
inline BlowupReport blowup_experiment(const FlowParams& p, const SupportField& u0, double horizon,
                                      StoppingConfig stop = {}) {
    if (!(p.q() > 1e-12)) throw std::domain_error("blowup experiment needs alpha > 1 - k beta");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    stop.t_max = horizon;

    BlowupReport rep;
    rep.main = run(u0.field(), p, FlowMode::nef2, stop);
    FlowParams cp = p;
    cp.alpha = 1.0 - p.k * p.beta;
    rep.control = run(u0.field(), cp, FlowMode::nef2, stop);

    const std::vector<double> R = detail::ratio_series(rep.main);
    rep.R_initial = R.front();
    rep.R_final = R.back();
    rep.R_nondecreasing = true;
    for (std::size_t i = 1; i < R.size(); ++i) {
        if (R[i] < R[i - 1]) rep.R_nondecreasing = false;
    }
    const bool early_stop = rep.main.stop_reason == StopReason::ratio_blowup ||
                            rep.main.stop_reason == StopReason::convexity_lost;
    rep.supports_blowup =
        rep.R_nondecreasing && (rep.R_final >= 2.0 * rep.R_initial || (early_stop && rep.R_final > rep.R_initial));

    // strict decrease until R is within roundoff of the sphere
    const std::vector<double> C = detail::ratio_series(rep.control);
    rep.control_R_final = C.back();
    rep.control_decreasing = C.size() >= 2;
    for (std::size_t i = 1; i < C.size(); ++i) {
        if (C[i - 1] - 1.0 < 1e-8) break;
        if (!(C[i] < C[i - 1])) rep.control_decreasing = false;
    }
    return rep;
}

}  // namespace anicurve
