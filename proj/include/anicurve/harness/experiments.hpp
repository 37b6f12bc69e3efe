// Experiment dispatch: each experiment writes its artifacts into an output
// directory and returns a process exit status.
#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/counterexample_lab.hpp"
#include "anicurve/flow_engine.hpp"
#include "anicurve/functionals.hpp"
#include "anicurve/harness/config.hpp"
#include "anicurve/harness/io.hpp"
#include "anicurve/soliton_solver.hpp"

namespace anicurve::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlowFailure = 2;

/// Refuses k = 1 runs whose anisotropy violates the positivity condition.
inline void require_admissible_f(const Grid& grid, const FlowParams& p) {
    if (p.k != 1) return;
    const double m = check_f_condition(grid, p);
    if (!(m > 0.0)) {
        throw ConfigError("anisotropy is not admissible for k = 1: Hess g + g I must be positive definite with "
                          "g = f^(1/(1+k beta-alpha)), but its smallest eigenvalue is " +
                          fmt(m) + "; convergence to a soliton is only guaranteed under this condition");
    }
}

struct CheckResult {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

/// Fast invariant suite over the core modules.
inline std::vector<CheckResult> validate_suite(int N) {
    const Grid g = Grid::make(N);
    std::vector<CheckResult> out;
    auto check_le = [&](const std::string& name, double value, double tol) {
        out.push_back({name, value, tol, std::isfinite(value) && value <= tol});
    };
    auto sup = [](const ScalarField& f) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    };

    check_le("sphere area quadrature", std::abs(integrate(ScalarField(g, 1.0)) - kSphereArea), 1e-10);

    const SupportField trans = translated_ball(g, 1.0, 0.3);
    const CurvatureMatrix Wt = curvature_matrix(trans);
    check_le("translate curvature radii", std::max(sup(Wt.b11 - ScalarField(g, 1.0)), sup(Wt.b22 - ScalarField(g, 1.0))),
             1e-5);
    check_le("mixed volume V2(1,1)", std::abs(mixed_volume(ScalarField(g, 1.0), {ScalarField(g, 1.0)}, 1) - 2 * kSphereArea),
             1e-9);

    const SupportField sph = spheroid_support(g, 1.0, 1.6);
    const BodyGeometry geo = body_geometry(sph);
    double nm = 0.0;
    for (int i = 0; i < N; ++i) nm = std::max(nm, geo.sigma2[i] - 0.25 * geo.sigma1[i] * geo.sigma1[i]);
    check_le("Newton-Maclaurin sigma2 <= sigma1^2/4", nm, 1e-12);
    check_le("Alexandrov-Fenchel k=1", -af_margin(sph, trans, 1), 1e-8);
    check_le("Alexandrov-Fenchel k=2", -af_margin(sph, trans, 2), 1e-8);

    const SupportField back = support_from_radial(radial_from_support(sph));
    check_le("support/radial round trip", sup(back.field() - sph.field()), 5e-3);

    const FlowParams p = FlowParams::make(1, 2.0, -2.0);
    check_le("tau/t inverse", std::abs(t_of_tau(tau_of_t(0.7, p), p) - 0.7), 1e-12);
    const SupportField big(ScalarField(g, 1.7));
    const SupportField small(ScalarField(g, 1.0));
    check_le("speed homogeneity",
             sup(speed(big, p) - std::pow(1.7, p.alpha + p.k * p.beta) * speed(small, p)), 1e-10);

    StoppingConfig stop;
    stop.t_max = 0.5;
    stop.tol_conv = 1e-300;
    const Trajectory tr = run(ScalarField(g, 0.5), p, FlowMode::nef1, stop);
    check_le("round NEF1 run matches barrier", sup(tr.final_state() - ScalarField(g, barrier(0.5, 0.5, p))), 1e-8);

    const SubsolutionParams sp = SubsolutionParams::make(1.0, 1, 1.0, 2.0);
    const double t = -0.3, edge = std::pow(0.3, sp.theta);
    const PsiJet lo = subsolution_jet(std::nextafter(edge, 0.0), t, sp);
    const PsiJet hi = subsolution_jet(edge, t, sp);
    check_le("sub-solution C1 matching", std::max(std::abs(lo.value - hi.value), std::abs(lo.d_rho - hi.d_rho)), 1e-12);
    return out;
}

struct RunContext {
    ExperimentConfig cfg;
    Experiment experiment;
    std::filesystem::path out;
};

inline int run_flow(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const Grid g = Grid::make(cfg.N);
    const FlowParams p = cfg.params(g);
    require_admissible_f(g, p);
    const ScalarField body = cfg.initial.build(g);
    require_convex(body, "initial body");
    const ScalarField u0 = cfg.mode == FlowMode::dual_radial ? body.map([](double x) { return 1.0 / x; }) : body;

    const Trajectory tr = run(u0, p, cfg.mode, cfg.stop);
    const std::vector<double> zexp = cfg.stop.z_exponents.empty() ? default_z_exponents(p) : cfg.stop.z_exponents;
    write_diagnostics(ctx.out / "diagnostics.csv", tr, zexp);
    write_snapshots(ctx.out, tr, cfg.mode == FlowMode::dual_radial ? "r" : "u");

    const bool expect_convergence = p.regime() != Regime::supercritical;
    const bool failed = tr.stop_reason == StopReason::convexity_lost || tr.stop_reason == StopReason::step_underflow;
    Json summary{{"stop_reason", to_string(tr.stop_reason)},
                 {"expected_to_converge", expect_convergence},
                 {"steps", tr.steps},
                 {"implicit_steps", tr.implicit_steps},
                 {"rollbacks", tr.rollbacks},
                 {"volume_drift_max", tr.volume_drift_max},
                 {"initial_scale", tr.initial_scale},
                 {"final", record_json(tr.diagnostics.back(), zexp)},
                 {"params", params_echo(cfg, ctx.experiment)}};
    write_json(ctx.out / "summary.json", summary);
    std::cout << "flow: " << to_string(tr.stop_reason) << " after " << tr.steps << " steps, R = "
              << fmt(tr.diagnostics.back().R) << '\n';
    return (expect_convergence && failed) ? kExitFlowFailure : kExitOk;
}

inline int run_soliton(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const Grid g = Grid::make(cfg.N);
    const FlowParams p = cfg.params(g);
    require_admissible_f(g, p);
    SolitonProblem prob{p, cfg.c, std::nullopt};
    Json summary{{"params", params_echo(cfg, ctx.experiment)}};
    try {
        const SolitonSolution sol = solve(g, prob);
        const SolitonSolution ns = normalize_soliton(sol, p);
        write_field(ctx.out / "soliton.csv", sol.u.field(), "u");
        write_field(ctx.out / "soliton_normalized.csv", ns.u.field(), "u");
        write_profile(ctx.out / "profile.csv", ns.u);
        summary["status"] = "converged";
        summary["iterations"] = sol.iterations;
        summary["residual_sup"] = sol.residual_sup;
        summary["c"] = sol.c;
        summary["c_normalized"] = ns.c;
        if (p.regime() == Regime::subcritical && cfg.trials >= 2) {
            summary["uniqueness_distance"] = uniqueness_check(g, prob, cfg.trials, cfg.seed);
            summary["uniqueness_trials"] = cfg.trials;
        }
        write_json(ctx.out / "summary.json", summary);
        std::cout << "soliton: converged in " << sol.iterations << " iterations, residual " << fmt(sol.residual_sup)
                  << '\n';
        return kExitOk;
    } catch (const NewtonStagnation& e) {
        write_field(ctx.out / "last_iterate.csv", e.last_iterate(), "u");
        summary["status"] = "stagnated";
        summary["message"] = e.what();
        summary["residual_sup"] = e.residual_sup();
        write_json(ctx.out / "summary.json", summary);
        std::cerr << "soliton: " << e.what() << '\n';
        return kExitError;
    }
}

inline Json branch_json(const BranchStats& b) {
    return Json{{"samples", b.samples}, {"c0", b.c0}, {"T_ratio_max", b.T_ratio_max}};
}

inline int run_counterexample(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const SubsolutionParams sp = SubsolutionParams::make(cfg.psi_alpha, cfg.psi_k, cfg.psi_beta, cfg.theta);
    const CaseBoundsReport cb = verify_case_bounds(sp, cfg.samples, cfg.seed);

    const Grid g = Grid::make(cfg.N);
    const FlowParams p = cfg.params(g);
    const ScalarField body = cfg.initial.build(g);
    require_convex(body, "initial body");
    const BlowupReport br = blowup_experiment(p, SupportField(body), cfg.horizon, cfg.stop);
    const std::vector<double> zexp = cfg.stop.z_exponents.empty() ? default_z_exponents(p) : cfg.stop.z_exponents;
    write_diagnostics(ctx.out / "diagnostics.csv", br.main, zexp);
    write_diagnostics(ctx.out / "diagnostics_control.csv", br.control, zexp);
    write_snapshots(ctx.out, br.main, "u");

    Json report{{"c0_empirical", cb.c0_empirical},
                {"T_ratio_max", cb.T_ratio_max},
                {"T_bound", sp.theta},
                {"T_bound_holds", cb.T_ratio_max <= sp.theta * (1.0 + 1e-9)},
                {"samples", cb.samples},
                {"branch_stats", {{"inner", branch_json(cb.inner)}, {"outer", branch_json(cb.outer)}}},
                {"mu", sp.mu},
                {"q", sp.q},
                {"verdict", br.verdict()},
                {"R_initial", br.R_initial},
                {"R_final", br.R_final},
                {"R_nondecreasing", br.R_nondecreasing},
                {"stop_reason", to_string(br.main.stop_reason)},
                {"control_alpha", 1.0 - p.k * p.beta},
                {"control_R_final", br.control_R_final},
                {"control_decreasing", br.control_decreasing},
                {"control_stop_reason", to_string(br.control.stop_reason)},
                {"seed", cfg.seed}};
    write_json(ctx.out / "report.json", report);
    write_json(ctx.out / "summary.json", Json{{"stop_reason", to_string(br.main.stop_reason)},
                                              {"verdict", br.verdict()},
                                              {"params", params_echo(cfg, ctx.experiment)}});
    std::cout << "counterexample: verdict '" << br.verdict() << "', T ratio max " << fmt(cb.T_ratio_max)
              << ", c0 " << fmt(cb.c0_empirical) << '\n';
    return kExitOk;
}

inline int run_barriers(const RunContext& ctx) {
    const ExperimentConfig& cfg = ctx.cfg;
    const Grid g = Grid::make(cfg.N);
    const FlowParams p = cfg.params(g);
    if (!p.f.is_unit()) throw ConfigError("barriers need f = constant 1");
    if (!(p.q() < 0.0)) throw ConfigError("barriers need alpha + k beta - 1 < 0");

    StoppingConfig stop = cfg.stop;
    stop.tol_conv = 1e-300;  // run the full horizon
    if (stop.snapshot_every == 0) stop.snapshot_every = stop.record_every;

    CsvWriter w(ctx.out / "barriers.csv", {"a", "tau", "barrier", "numeric_min", "numeric_max", "error"});
    double worst = 0.0;
    for (double a : cfg.radii) {
        const Trajectory tr = run(ScalarField(g, a), p, FlowMode::nef1, stop);
        for (const Snapshot& s : tr.snapshots) {
            const Extrema e = extrema(s.state);
            const double b = barrier(a, s.tau, p);
            const double err = std::max(std::abs(e.min - b), std::abs(e.max - b));
            worst = std::max(worst, err);
            w.row({a, s.tau, b, e.min, e.max, err});
        }
    }
    write_json(ctx.out / "summary.json", Json{{"max_error", worst}, {"params", params_echo(cfg, ctx.experiment)}});
    std::cout << "barriers: max error " << fmt(worst) << '\n';
    return kExitOk;
}

inline int run_validate(const RunContext& ctx) {
    const auto checks = validate_suite(ctx.cfg.N);
    Json list = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        list.push_back(Json{{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(c.value) << " <= " << fmt(c.tolerance)
                  << ")\n";
    }
    write_json(ctx.out / "summary.json",
               Json{{"all_pass", all}, {"checks", list}, {"params", params_echo(ctx.cfg, ctx.experiment)}});
    return all ? kExitOk : kExitError;
}

/// Runs one experiment; configuration and precondition errors propagate.
inline int run_experiment(const ExperimentConfig& cfg, Experiment e, const std::filesystem::path& out) {
    if (cfg.experiment && *cfg.experiment != e) {
        throw ConfigError(std::string("config declares experiment '") + to_string(*cfg.experiment) +
                          "' but '" + to_string(e) + "' was requested");
    }
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out.string() + "': " + ec.message());
    const RunContext ctx{cfg, e, out};
    switch (e) {
    case Experiment::flow:
        return run_flow(ctx);
    case Experiment::soliton:
        return run_soliton(ctx);
    case Experiment::counterexample:
        return run_counterexample(ctx);
    case Experiment::validate:
        return run_validate(ctx);
    case Experiment::barriers:
        return run_barriers(ctx);
    }
    return kExitError;
}

}  // namespace anicurve::harness
