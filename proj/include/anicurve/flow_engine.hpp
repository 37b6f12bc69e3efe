// Time integration of the expanding flows f u^alpha sigma_k^beta in
// support-function form, their normalized versions, and the dual flow of the
// radial function of the polar body.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/functionals.hpp"
#include "anicurve/sphere_calculus.hpp"

namespace anicurve {

enum class FlowMode {
    raw,          // du/dt = f u^alpha sigma_k^beta
    nef1,         // du/dtau = u^alpha sigma_k^beta - gamma u   (f == 1)
    nef2,         // du/dtau = f u^alpha sigma_k^beta - eta u
    dual_radial,  // dr/dt = -r^(2-alpha) sigma_k^beta(W_{1/r})
};

inline const char* to_string(FlowMode m) {
    switch (m) {
    case FlowMode::raw:
        return "raw";
    case FlowMode::nef1:
        return "nef1";
    case FlowMode::nef2:
        return "nef2";
    case FlowMode::dual_radial:
        return "dual_radial";
    }
    return "?";
}

inline FlowMode flow_mode_from_string(const std::string& s) {
    if (s == "raw") return FlowMode::raw;
    if (s == "nef1") return FlowMode::nef1;
    if (s == "nef2") return FlowMode::nef2;
    if (s == "dual_radial") return FlowMode::dual_radial;
    throw std::invalid_argument("unknown flow mode '" + s + "' (expected raw, nef1, nef2, dual_radial)");
}

enum class StopReason { converged, t_max, convexity_lost, ratio_blowup, step_underflow };

inline const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::converged:
        return "converged";
    case StopReason::t_max:
        return "t_max";
    case StopReason::convexity_lost:
        return "convexity_lost";
    case StopReason::ratio_blowup:
        return "ratio_blowup";
    case StopReason::step_underflow:
        return "step_underflow";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Closed-form scaling maps and round solutions

namespace detail {
inline void check_scaling_domain(double t, const FlowParams& p) {
    if (!(t >= 0.0)) throw std::domain_error("scaling maps need t >= 0");
    if (p.regime() != Regime::critical) {
        const double c = -p.q();
        if (!(1.0 + c * p.gamma() * t > 0.0)) {
            throw std::domain_error("scaling maps undefined past the round blow-up time");
        }
    }
}
}  // namespace detail

/// Radius at time t of the raw flow started from the unit sphere.
inline double phi(double t, const FlowParams& p) {
    detail::check_scaling_domain(t, p);
    const double g = p.gamma();
    if (p.regime() == Regime::critical) return std::exp(g * t);
    const double c = -p.q();
    return std::pow(1.0 + c * g * t, 1.0 / c);
}

/// Normalized time: d tau / dt = phi^(alpha + k beta - 1).
inline double tau_of_t(double t, const FlowParams& p) {
    detail::check_scaling_domain(t, p);
    if (p.regime() == Regime::critical) return t;
    const double c = -p.q();
    const double g = p.gamma();
    return std::log1p(c * g * t) / (c * g);
}

inline double t_of_tau(double tau, const FlowParams& p) {
    if (p.regime() == Regime::critical) return tau;
    const double cg = -p.q() * p.gamma();
    return std::expm1(cg * tau) / cg;
}

/// Exact NEF1 solution from the round body of radius a (requires q < 0).
inline double barrier(double a, double t, const FlowParams& p) {
    if (!(a > 0.0)) throw std::invalid_argument("barrier radius must be positive");
    const double q = p.q();
    if (!(q < 0.0)) throw std::domain_error("barrier solutions need alpha + k beta - 1 < 0");
    return std::pow(1.0 - (1.0 - std::pow(a, -q)) * std::exp(q * p.gamma() * t), -1.0 / q);
}

// ---------------------------------------------------------------------------
// Right-hand sides

/// Evaluates one flow's right-hand side on a fixed grid.
class FlowOperator {
public:
    FlowOperator(const Grid& grid, FlowParams p, FlowMode mode)
        : grid_(grid), p_(std::move(p)), mode_(mode), f_(p_.f.on(grid)) {
        if ((mode == FlowMode::nef1 || mode == FlowMode::dual_radial) && !p_.f.is_unit()) {
            throw std::invalid_argument(std::string(to_string(mode)) + " flow requires f == 1");
        }
    }

    [[nodiscard]] const FlowParams& params() const { return p_; }
    [[nodiscard]] FlowMode mode() const { return mode_; }
    [[nodiscard]] const ScalarField& f() const { return f_; }

    /// Matrix whose eigenvalues enter sigma_k: W_u, or W_{1/r} built from r directly.
    [[nodiscard]] CurvatureMatrix matrix(const ScalarField& state) const {
        if (mode_ != FlowMode::dual_radial) return curvature_matrix(state);
        const ScalarField d1 = differentiate(state, 1, Parity::even);
        const ScalarField d2 = differentiate(state, 2, Parity::even);
        const auto cot = grid_.cot_theta();
        CurvatureMatrix M{ScalarField(grid_), ScalarField(grid_)};
        for (int i = 0; i < state.size(); ++i) {
            const double r = state[i];
            M.b11[i] = 1.0 / r + 2.0 * d1[i] * d1[i] / (r * r * r) - d2[i] / (r * r);
            M.b22[i] = 1.0 / r - d1[i] * cot[i] / (r * r);
        }
        return M;
    }

    /// Admissibility margin of a state (minimum principal radius; -inf if the state is non-positive).
    [[nodiscard]] double margin(const ScalarField& state) const {
        for (double v : state.values()) {
            if (!(v > 0.0) || !std::isfinite(v)) return -std::numeric_limits<double>::infinity();
        }
        return convexity_margin(matrix(state));
    }

    /// nullopt when the state has left the admissible cone.
    [[nodiscard]] std::optional<ScalarField> rhs(const ScalarField& state) const {
        const CurvatureMatrix M = matrix(state);
        const ScalarField sk = sigma_k(M, p_.k);
        ScalarField speed(grid_);
        for (int i = 0; i < state.size(); ++i) {
            if (!(state[i] > 0.0) || !(sk[i] > 0.0) || !std::isfinite(sk[i])) return std::nullopt;
        }
        switch (mode_) {
        case FlowMode::raw:
            for (int i = 0; i < state.size(); ++i) {
                speed[i] = f_[i] * std::pow(state[i], p_.alpha) * std::pow(sk[i], p_.beta);
            }
            return speed;
        case FlowMode::nef1: {
            const double g = p_.gamma();
            for (int i = 0; i < state.size(); ++i) {
                speed[i] = std::pow(state[i], p_.alpha) * std::pow(sk[i], p_.beta) - g * state[i];
            }
            return speed;
        }
        case FlowMode::nef2: {
            ScalarField flux(grid_);
            for (int i = 0; i < state.size(); ++i) {
                speed[i] = f_[i] * std::pow(state[i], p_.alpha) * std::pow(sk[i], p_.beta);
                flux[i] = speed[i] * sk[i];
            }
            const double e = integrate(flux) / kSphereArea;
            for (int i = 0; i < state.size(); ++i) speed[i] -= e * state[i];
            return speed;
        }
        case FlowMode::dual_radial:
            for (int i = 0; i < state.size(); ++i) {
                speed[i] = -std::pow(state[i], 2.0 - p_.alpha) * std::pow(sk[i], p_.beta);
            }
            return speed;
        }
        return std::nullopt;
    }

    /// Largest diffusion coefficient of the linearized operator.
    [[nodiscard]] double diffusion_max(const ScalarField& state) const {
        const CurvatureMatrix M = matrix(state);
        const ScalarField sk = sigma_k(M, p_.k);
        double D = 0.0;
        for (int i = 0; i < state.size(); ++i) {
            const double partial = (p_.k == 1) ? 1.0 : std::max(M.b11[i], M.b22[i]);
            // for the dual flow, r^(2-alpha) / r^2 = s^alpha with s = 1/r
            const double base = (mode_ == FlowMode::dual_radial) ? std::pow(state[i], -p_.alpha)
                                                                  : f_[i] * std::pow(state[i], p_.alpha);
            D = std::max(D, p_.beta * base * std::pow(sk[i], p_.beta - 1.0) * partial);
        }
        return D;
    }

    [[nodiscard]] double adaptive_dt(const ScalarField& state, double c_cfl) const {
        const double h = grid_.h();
        return c_cfl * h * h / diffusion_max(state);
    }

    /// Classical RK4 step; nullopt if any stage or the result leaves the cone.
    [[nodiscard]] std::optional<ScalarField> rk4(const ScalarField& u, double dt) const {
        const auto k1 = rhs(u);
        if (!k1) return std::nullopt;
        const auto k2 = rhs(u + (0.5 * dt) * *k1);
        if (!k2) return std::nullopt;
        const auto k3 = rhs(u + (0.5 * dt) * *k2);
        if (!k3) return std::nullopt;
        const auto k4 = rhs(u + dt * *k3);
        if (!k4) return std::nullopt;
        ScalarField next(u);
        for (int i = 0; i < u.size(); ++i) {
            next[i] += dt / 6.0 * ((*k1)[i] + 2.0 * (*k2)[i] + 2.0 * (*k3)[i] + (*k4)[i]);
        }
        if (!(margin(next) > 0.0)) return std::nullopt;
        return next;
    }

    /// Linearized backward Euler with a finite-difference Jacobian.
    [[nodiscard]] std::optional<ScalarField> implicit_euler(const ScalarField& u, double dt) const {
        const auto F0 = rhs(u);
        if (!F0) return std::nullopt;
        const int n = u.size();
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
        ScalarField probe(u);
        for (int j = 0; j < n; ++j) {
            const double eps = 1e-7 * std::max(1.0, std::abs(u[j]));
            probe[j] = u[j] + eps;
            const auto Fj = rhs(probe);
            probe[j] = u[j];
            if (!Fj) return std::nullopt;
            for (int i = 0; i < n; ++i) A(i, j) -= dt * ((*Fj)[i] - (*F0)[i]) / eps;
        }
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b(i) = dt * (*F0)[i];
        const Eigen::VectorXd delta = A.partialPivLu().solve(b);
        ScalarField next(u);
        for (int i = 0; i < n; ++i) next[i] += delta(i);
        if (!(margin(next) > 0.0)) return std::nullopt;
        return next;
    }

private:
    Grid grid_;
    FlowParams p_;
    FlowMode mode_;
    ScalarField f_;
};

// ---------------------------------------------------------------------------
// Single-call operations

/// Node-wise f u^alpha sigma_k^beta.
inline ScalarField speed(const SupportField& u, const FlowParams& p) {
    require_convex(u.field(), "speed");
    return *FlowOperator(u.grid(), p, FlowMode::raw).rhs(u.field());
}

/// One RK4 step; nullopt signals that the caller should roll back.
inline std::optional<ScalarField> step(const ScalarField& state, const FlowParams& p, FlowMode mode, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step needs dt > 0");
    return FlowOperator(state.grid(), p, mode).rk4(state, dt);
}

inline double adaptive_dt(const SupportField& u, const FlowParams& p, double c_cfl = 0.4) {
    return FlowOperator(u.grid(), p, FlowMode::raw).adaptive_dt(u.field(), c_cfl);
}

// ---------------------------------------------------------------------------
// Runs

struct StoppingConfig {
    double t_max = 10.0;      // horizon in the run variable (tau for nef1/nef2, t otherwise)
    double tol_conv = 1e-8;   // sup norm of du/dtau for normalized modes
    double R_blowup = 50.0;
    double dt_min = 1e-12;
    double c_cfl = 0.4;
    int record_every = 100;   // steps between diagnostics records
    int snapshot_every = 0;   // steps between snapshots; 0 keeps only first and last
    int max_rollbacks = 3;
    std::vector<double> z_exponents;  // empty selects default_z_exponents

    void validate() const {
        if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
        if (!(tol_conv > 0.0)) throw std::invalid_argument("tol_conv must be positive");
        if (!(R_blowup > 1.0)) throw std::invalid_argument("R_blowup must exceed 1");
        if (!(dt_min > 0.0)) throw std::invalid_argument("dt_min must be positive");
        if (!(c_cfl > 0.0)) throw std::invalid_argument("c_cfl must be positive");
        if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
        if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
        if (max_rollbacks < 0) throw std::invalid_argument("max_rollbacks must be >= 0");
    }
};

struct Snapshot {
    double t;
    double tau;
    ScalarField state;  // u for support modes, r for dual_radial
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRecord> diagnostics;
    std::vector<double> rhs_sup;  // sup norm of the right-hand side at each record
    std::vector<long> record_steps;
    StopReason stop_reason = StopReason::t_max;
    long steps = 0;
    long implicit_steps = 0;
    long rollbacks = 0;
    double volume_drift_max = 0.0;  // nef2: max |integral(u sigma_k)/|S^2| - 1|
    double initial_scale = 1.0;     // nef2: raw/normalized scale of u0

    [[nodiscard]] const ScalarField& final_state() const { return snapshots.back().state; }
};

/// Integrates a flow until one of the stopping conditions fires.
inline Trajectory run(const ScalarField& u0, const FlowParams& p, FlowMode mode, const StoppingConfig& stop) {
    stop.validate();
    const FlowOperator op(u0.grid(), p, mode);
    if (!(op.margin(u0) > 0.0)) throw std::domain_error("run: initial body is not uniformly convex");
    const std::vector<double> zexp = stop.z_exponents.empty() ? default_z_exponents(p) : stop.z_exponents;

    Trajectory traj;
    ScalarField u = u0;
    double log_scale = 0.0;
    if (mode == FlowMode::nef2) {
        const double V = quermass_volume(u0, p.k);
        const double s = std::pow(kSphereArea / V, 1.0 / (p.k + 1));
        u = s * u0;
        log_scale = -std::log(s);
        traj.initial_scale = 1.0 / s;
    }

    const bool normalized = mode == FlowMode::nef1 || mode == FlowMode::nef2;
    double run_time = 0.0;  // tau for normalized modes, t otherwise
    double t = 0.0;
    double tau = 0.0;

    auto support_of = [&](const ScalarField& s) {
        return mode == FlowMode::dual_radial ? SupportField(s.map([](double r) { return 1.0 / r; }))
                                             : SupportField(s);
    };
    double eta_now = mode == FlowMode::nef2 ? eta(SupportField(u), p) : 0.0;
    auto sup_norm = [](const ScalarField& g) {
        double m = 0.0;
        for (double v : g.values()) m = std::max(m, std::abs(v));
        return m;
    };
    auto record = [&](double rhs_norm) {
        traj.diagnostics.push_back(diagnose(support_of(u), p, zexp, t, tau));
        traj.rhs_sup.push_back(rhs_norm);
        traj.record_steps.push_back(traj.steps);
        if (mode == FlowMode::nef2) {
            const double drift = std::abs(quermass_volume(u, p.k) / kSphereArea - 1.0);
            traj.volume_drift_max = std::max(traj.volume_drift_max, drift);
        }
    };
    auto clock = [&](double dt, const ScalarField& after) {
        run_time += dt;
        switch (mode) {
        case FlowMode::raw:
            t = run_time;
            tau = (p.regime() == Regime::supercritical && 1.0 - p.q() * p.gamma() * t <= 0.0)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : tau_of_t(t, p);
            break;
        case FlowMode::nef1:
            tau = run_time;
            t = t_of_tau(tau, p);
            break;
        case FlowMode::nef2: {
            // raw = lambda * normalized with d log(lambda)/dtau = eta and dt = lambda^(-q) dtau
            const double e0 = eta_now;
            eta_now = eta(SupportField(after), p);
            const double l0 = log_scale;
            log_scale += 0.5 * (e0 + eta_now) * dt;
            t += 0.5 * (std::exp(-p.q() * l0) + std::exp(-p.q() * log_scale)) * dt;
            tau = run_time;
            break;
        }
        case FlowMode::dual_radial:
            t = run_time;
            tau = run_time;
            break;
        }
    };

    auto first_rhs = op.rhs(u);
    if (!first_rhs) throw std::domain_error("run: right-hand side undefined at the initial body");
    traj.snapshots.push_back({t, tau, u});
    record(sup_norm(*first_rhs));
    double last_rhs = sup_norm(*first_rhs);

    bool stopped = false;
    while (!stopped) {
        double dt = op.adaptive_dt(u, stop.c_cfl);
        bool use_implicit = false;
        if (dt < stop.dt_min) {
            dt = stop.dt_min;
            use_implicit = true;
        }
        dt = std::min(dt, stop.t_max - run_time);

        std::optional<ScalarField> next;
        int attempts = 0;
        while (true) {
            next = use_implicit ? op.implicit_euler(u, dt) : op.rk4(u, dt);
            if (next) break;
            if (attempts == stop.max_rollbacks) break;
            ++attempts;
            ++traj.rollbacks;
            dt *= 0.5;
            if (dt < stop.dt_min) break;
        }
        if (!next) {
            traj.stop_reason = (dt < stop.dt_min) ? StopReason::step_underflow : StopReason::convexity_lost;
            break;
        }

        u = std::move(*next);
        ++traj.steps;
        if (use_implicit) ++traj.implicit_steps;
        clock(dt, u);

        const auto F = op.rhs(u);
        if (!F) {
            traj.stop_reason = StopReason::convexity_lost;
            break;
        }
        last_rhs = sup_norm(*F);
        const Extrema ex = extrema(u);
        const double R = ex.max / ex.min;

        if (normalized && last_rhs < stop.tol_conv) {
            traj.stop_reason = StopReason::converged;
            stopped = true;
        } else if (R >= stop.R_blowup) {
            traj.stop_reason = StopReason::ratio_blowup;
            stopped = true;
        } else if (run_time >= stop.t_max * (1.0 - 1e-15)) {
            traj.stop_reason = StopReason::t_max;
            stopped = true;
        }
        if (stopped || traj.steps % stop.record_every == 0) record(last_rhs);
        if (!stopped && stop.snapshot_every > 0 && traj.steps % stop.snapshot_every == 0) {
            traj.snapshots.push_back({t, tau, u});
        }
    }
    if (traj.record_steps.back() != traj.steps) record(last_rhs);
    if (traj.steps > 0) traj.snapshots.push_back({t, tau, u});
    return traj;
}

}  // namespace anicurve
