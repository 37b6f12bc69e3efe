#include "catch_amalgamated.hpp"

#include <cmath>

#include "anicurve/flow_engine.hpp"
#include "anicurve/soliton_solver.hpp"
#include "support.hpp"

using namespace anicurve;
using testing_support::sup_abs;
using testing_support::sup_diff;

namespace {

FlowParams aniso_params() {
    // g = f^(1/(1 + k beta - alpha)) = 1 + 0.2 cos theta is a translate, so Hess g + g I > 0
    return FlowParams::make(1, 2.0, -2.0, Anisotropy::power_of_linear(0.2, 5.0));
}

}  // namespace

TEST_CASE("soliton residual on round bodies", "[residual]") {
    const Grid g = Grid::make(64);
    const FlowParams p = FlowParams::make(1, 2.0, -2.0);
    CHECK(sup_abs(residual(SupportField(ScalarField(g, 4.0)), SolitonProblem{p, 1.0, {}})) < 1e-13);
    CHECK(sup_abs(residual(SupportField(ScalarField(g, 1.0)), SolitonProblem{p, p.gamma(), {}})) < 1e-12);
    const ScalarField r = residual(SupportField(ScalarField(g, 1.0)), SolitonProblem{p, 2 * p.gamma(), {}});
    CHECK(sup_diff(r, ScalarField(g, -p.gamma())) < 1e-12);
    const ScalarField bad = ScalarField::sample(g, [](double t) { return 1 + 0.8 * std::cos(2 * t); });
    CHECK_THROWS_AS(residual(SupportField(bad), SolitonProblem{p, 1.0, {}}), std::domain_error);
}

TEST_CASE("solve reproduces round solitons", "[solve]") {
    const Grid g = Grid::make(64);
    const SolitonSolution s = solve(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0), 1.0, {}});
    CHECK(sup_diff(s.u.field(), ScalarField(g, 4.0)) < 1e-9);
    const SolitonSolution s2 = solve(g, SolitonProblem{FlowParams::make(2, 1.0, -2.0), 1.0, {}});
    CHECK(sup_diff(s2.u.field(), ScalarField(g, 1.0)) < 1e-9);
    // from a non-round start
    const ScalarField start = translated_ball(g, 3.0, 0.4).field();
    const SolitonSolution s3 = solve(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0), 1.0, start});
    CHECK(sup_diff(s3.u.field(), ScalarField(g, 4.0)) < 1e-8);
}

TEST_CASE("solve finds a non-round anisotropic soliton", "[solve]") {
    const Grid g = Grid::make(64);
    const SolitonProblem prob{aniso_params(), 1.0, {}};
    const SolitonSolution s = solve(g, prob);
    CHECK(s.residual_sup < 1e-10);
    CHECK(sup_abs(residual(s.u, prob)) < 1e-10);
    const Extrema e = extrema(s.u.field());
    CHECK(e.max / e.min > 1.05);
    CHECK(convexity_margin(s.u) > 0.0);
}

TEST_CASE("soliton scaling law", "[solve][property]") {
    const Grid g = Grid::make(48);
    for (const FlowParams& p : {aniso_params(), FlowParams::make(2, 1.0, -2.0), FlowParams::make(1, 1.5, -1.5)}) {
        const SolitonSolution s = solve(g, SolitonProblem{p, 1.0, {}});
        for (double scale : {0.5, 3.0}) {
            const double c2 = std::pow(scale, p.q()) * s.c;
            const ScalarField r = residual(SupportField(scale * s.u.field()), SolitonProblem{p, c2, {}});
            CHECK(sup_abs(r) < 1e-9 * std::max(1.0, c2));
        }
    }
}

TEST_CASE("normalized soliton has unit quermass volume", "[solve]") {
    const Grid g = Grid::make(48);
    const FlowParams p = aniso_params();
    const SolitonSolution n = normalize_soliton(solve(g, SolitonProblem{p, 1.0, {}}), p);
    CHECK(quermass_volume(n.u.field(), p.k) == Catch::Approx(kSphereArea).epsilon(1e-12));
    CHECK(sup_abs(residual(n.u, SolitonProblem{p, n.c, {}})) < 1e-9 * std::max(1.0, n.c));
}

TEST_CASE("solve error paths", "[solve]") {
    const Grid g = Grid::make(32);
    NewtonOptions one;
    one.max_iterations = 1;
    try {
        solve(g, SolitonProblem{aniso_params(), 1.0, {}}, one);
        FAIL("expected stagnation");
    } catch (const NewtonStagnation& e) {
        CHECK(e.last_iterate().size() == g.size());
        CHECK(e.residual_sup() > 1e-10);
    }
    CHECK_THROWS_AS(solve(g, SolitonProblem{FlowParams::make(1, 1.5, 0.5), 1.0, {}}), std::domain_error);
    CHECK_THROWS_AS(solve(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0), 0.0, {}}), std::invalid_argument);
    const Anisotropy bad = Anisotropy::from_field(
        ScalarField::sample(g, [](double t) { return std::pow(1 + 0.36 * std::cos(2 * t), 5.0); }));
    CHECK_THROWS_AS(solve(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0, bad), 1.0, {}}), std::domain_error);
}

TEST_CASE("uniqueness across randomized starts", "[uniqueness]") {
    const Grid g = Grid::make(48);
    CHECK(uniqueness_check(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0), 1.0, {}}, 3, 7) < 1e-10);
    CHECK(uniqueness_check(g, SolitonProblem{aniso_params(), 1.0, {}}, 3, 7) < 1e-6);
    CHECK_THROWS_AS(uniqueness_check(g, SolitonProblem{FlowParams::make(1, 2.0, -1.0), 1.0, {}}, 3),
                    std::domain_error);
    CHECK_THROWS_AS(uniqueness_check(g, SolitonProblem{FlowParams::make(1, 2.0, -2.0), 1.0, {}}, 1),
                    std::invalid_argument);
}

TEST_CASE("soliton minimises J among normalized flow iterates", "[solve][property]") {
    const Grid g = Grid::make(48);
    const FlowParams p = aniso_params();
    const SolitonSolution s = normalize_soliton(solve(g, SolitonProblem{p, 1.0, {}}), p);
    const double J_star = J_functional(s.u, p);
    for (double eps : {0.0, 0.3}) {
        StoppingConfig stop;
        stop.t_max = 5.0;
        stop.record_every = 25;
        const Trajectory tr = run(translated_ball(g, 1.0, eps).field(), p, FlowMode::nef2, stop);
        for (const auto& d : tr.diagnostics) CHECK(J_star <= d.J + 1e-8 * std::abs(d.J));
    }
}
