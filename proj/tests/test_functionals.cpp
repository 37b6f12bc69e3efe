#include "catch_amalgamated.hpp"

#include <cmath>

#include "anicurve/functionals.hpp"
#include "support.hpp"

using namespace anicurve;
using testing_support::BodyGenerator;
using testing_support::sup_diff;

namespace {

SupportField round_body(const Grid& g, double r) { return SupportField(ScalarField(g, r)); }

}  // namespace

TEST_CASE("flow parameters enforce beta > 1/k", "[params]") {
    CHECK_THROWS_AS(FlowParams::make(1, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FlowParams::make(1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FlowParams::make(2, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FlowParams::make(3, 2.0, 0.0), std::invalid_argument);
    CHECK_NOTHROW(FlowParams::make(2, 0.6, 0.0));
    CHECK_NOTHROW(FlowParams::unchecked(1, 1.0, 0.0));
    CHECK_THROWS_AS(FlowParams::unchecked(1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("derived constants and regime", "[params]") {
    const FlowParams p = FlowParams::make(1, 2.0, -2.0);
    CHECK(p.gamma() == Catch::Approx(4.0));
    CHECK(p.q() == Catch::Approx(-1.0));
    CHECK(p.regime() == Regime::subcritical);
    CHECK(FlowParams::make(2, 1.0, -1.0).regime() == Regime::critical);
    CHECK(FlowParams::make(1, 1.5, 0.5).regime() == Regime::supercritical);
    CHECK(FlowParams::make(2, 1.5, 0.0).gamma() == Catch::Approx(1.0));
    for (double alpha : {-3.0, -1.0, -0.5, 0.0, 0.7}) {
        const FlowParams s = FlowParams::make(1, 1.5, alpha);
        const Regime expect = alpha < -0.5 ? Regime::subcritical : alpha > -0.5 ? Regime::supercritical : Regime::critical;
        CHECK(s.regime() == expect);
    }
}

TEST_CASE("anisotropy kinds", "[anisotropy]") {
    CHECK_THROWS_AS(Anisotropy::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy::power_of_linear(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy::tabulated({0.0, 1.0}, {1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy::tabulated({1.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Anisotropy::tabulated({0.0}, {1.0}), std::invalid_argument);
    const Anisotropy pl = Anisotropy::power_of_linear(0.2, 3.0);
    CHECK(pl(0.4) == Catch::Approx(std::pow(1 + 0.2 * std::cos(0.4), 3.0)));
    const Anisotropy tab = Anisotropy::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
    CHECK(tab(0.5) == Catch::Approx(2.0));
    CHECK(tab(-1.0) == 1.0);
    CHECK(tab(5.0) == 2.0);
    const Grid g = Grid::make(32);
    const ScalarField f = ScalarField::sample(g, [](double t) { return 1 + 0.3 * std::cos(2 * t); });
    CHECK(sup_diff(Anisotropy::from_field(f).on(g), f) == 0.0);
    CHECK(Anisotropy::constant().is_unit());
    CHECK_FALSE(Anisotropy::constant(2.0).is_unit());
}

TEST_CASE("rho field on round bodies", "[rho]") {
    const Grid g = Grid::make(64);
    CHECK(sup_diff(rho_field(round_body(g, 1.0), FlowParams::unchecked(1, 1.0, -1.0)), ScalarField(g, 2.0)) < 1e-12);
    // 4^-3 * 8^2 = 1
    CHECK(sup_diff(rho_field(round_body(g, 4.0), FlowParams::make(1, 2.0, -2.0)), ScalarField(g, 1.0)) < 1e-12);
    CHECK(sup_diff(rho_field(round_body(g, 1.0), FlowParams::make(2, 1.0, 0.0)), ScalarField(g, 1.0)) < 1e-12);
    const ScalarField bad = ScalarField::sample(g, [](double t) { return 1 + 0.8 * std::cos(2 * t); });
    CHECK_THROWS_AS(rho_field(SupportField(bad), FlowParams::make(1, 2.0, -2.0)), std::domain_error);
}

TEST_CASE("Z_p on round bodies", "[Z_p]") {
    const Grid g = Grid::make(200);
    const FlowParams p = FlowParams::unchecked(1, 1.0, -1.0);
    CHECK(std::abs(Z_p(round_body(g, 1.0), p, 1.0) - 16 * kPi) < 1e-7);
    CHECK(std::abs(Z_p(round_body(g, 1.0), p, 2.0) - 32 * kPi) < 1e-7);
    BodyGenerator gen(2);
    for (int i = 0; i < 5; ++i) {
        for (int k : {1, 2}) {
            const SupportField u = normalize_tilde(gen.next(g), k);
            CHECK(std::abs(Z_p(u, FlowParams::make(k, 2.0, -2.0), 0.0) - 4 * kPi) < 1e-6);
        }
    }
}

TEST_CASE("eta", "[eta]") {
    const Grid g = Grid::make(200);
    CHECK(eta(round_body(g, 1.0), FlowParams::unchecked(1, 1.0, -1.0)) == Catch::Approx(4.0).epsilon(1e-9));
    CHECK(eta(round_body(g, 4.0), FlowParams::make(1, 2.0, -2.0)) == Catch::Approx(32.0).epsilon(1e-9));
}

TEST_CASE("J functional", "[J]") {
    const Grid g = Grid::make(200);
    CHECK(std::abs(J_functional(round_body(g, 1.0), FlowParams::make(1, 2.0, -1.0)) - 4 * kPi) < 1e-8);

    // normalized round body has constant rho, so J = 4 pi rho^(-1/beta)
    for (int k : {1, 2}) {
        const FlowParams p = FlowParams::make(k, 2.0, -3.0);
        const SupportField u = normalize_tilde(round_body(g, 1.0), k);
        const double rho = rho_field(u, p)[0];
        CHECK(J_functional(u, p) == Catch::Approx(4 * kPi * std::pow(rho, -1.0 / p.beta)).epsilon(1e-9));
    }
}

TEST_CASE("Z_p and J are homogeneous", "[Z_p][property]") {
    const Grid g = Grid::make(120);
    BodyGenerator gen(4);
    for (int i = 0; i < 8; ++i) {
        const SupportField u = gen.next(g);
        const int k = 1 + i % 2;
        const FlowParams p = FlowParams::make(k, 1.5 + 0.25 * i, -1.0 - 0.5 * i);
        const double c = 0.6 + 0.3 * i;
        const SupportField cu(c * u.field());
        const double deg_scale = p.alpha - 1 + k * p.beta;
        for (double e : {-1.0 / p.beta, 0.0, 1.0, 2.0}) {
            const double ratio = Z_p(cu, p, e) / Z_p(u, p, e);
            CHECK(ratio == Catch::Approx(std::pow(c, (k + 1) + e * deg_scale)).epsilon(1e-10));
        }
        CHECK(J_functional(cu, p) / J_functional(u, p) ==
              Catch::Approx(std::pow(c, k + 1 - deg_scale / p.beta)).epsilon(1e-10));
    }
}

TEST_CASE("Z_2 dominates Z_1^2 / 4pi on normalized bodies", "[Z_p][property]") {
    const Grid g = Grid::make(120);
    BodyGenerator gen(6);
    for (int i = 0; i < 20; ++i) {
        const int k = 1 + i % 2;
        const FlowParams p = FlowParams::make(k, 2.0, -2.0, Anisotropy::power_of_linear(0.3, 1.0));
        const SupportField u = normalize_tilde(gen.next(g), k);
        const double z1 = Z_p(u, p, 1.0);
        CHECK(Z_p(u, p, 2.0) >= z1 * z1 / (4 * kPi) * (1 - 1e-12));
    }
}

TEST_CASE("anisotropy condition", "[f_condition]") {
    const Grid g = Grid::make(200);
    CHECK(check_f_condition(g, FlowParams::make(1, 2.0, -2.0)) == Catch::Approx(1.0).epsilon(1e-12));
    for (const auto& [k, beta, alpha] : {std::tuple{1, 2.0, -2.0}, std::tuple{2, 1.0, -2.0}}) {
        const double e = 1 + k * beta - alpha;
        const FlowParams p = FlowParams::make(k, beta, alpha, Anisotropy::power_of_linear(0.2, e));
        CHECK(std::abs(check_f_condition(g, p) - 1.0) < 1e-6);
    }
    // g = 1 + a cos 2theta has margin 1 - 3a at the poles
    auto with_amplitude = [&](double a) {
        const double e = 5.0;
        const ScalarField f = ScalarField::sample(g, [=](double t) { return std::pow(1 + a * std::cos(2 * t), e); });
        return check_f_condition(g, FlowParams::make(1, 2.0, -2.0, Anisotropy::from_field(f)));
    };
    CHECK(with_amplitude(0.1) > 0.0);
    CHECK(with_amplitude(0.9) < 0.0);
    CHECK(with_amplitude(0.3) > 0.0);
    CHECK(with_amplitude(0.36) < 0.0);
    CHECK_THROWS_AS(check_f_condition(g, FlowParams::make(1, 2.0, 3.0)), std::invalid_argument);
}

TEST_CASE("Alexandrov-Fenchel margin", "[af]") {
    const Grid g = Grid::make(200);
    const SupportField p = spheroid_support(g, 1.0, 2.0);
    for (int k : {1, 2}) {
        CHECK(af_margin(p, p, k) == 0.0);
        CHECK(std::abs(af_margin(SupportField(2.0 * p.field()), p, k)) < 1e-10);
    }
    CHECK(af_margin(round_body(g, 1.0), p, 1) > 0.0);
    CHECK(af_margin(round_body(g, 1.0), p, 2) > 0.0);
}

TEST_CASE("Alexandrov-Fenchel on random pairs", "[af][property]") {
    const Grid g = Grid::make(100);
    BodyGenerator gen(17);
    for (int i = 0; i < 30; ++i) {
        const SupportField v = gen.next(g), u = gen.next(g);
        const double scale = std::max(extrema(v.field()).max, extrema(u.field()).max);
        for (int k : {1, 2}) CHECK(af_margin(v, u, k) >= -1e-8 * std::pow(scale, 4));
    }
}

TEST_CASE("diagnostics record", "[diagnose]") {
    const Grid g = Grid::make(100);
    const FlowParams p = FlowParams::make(1, 2.0, -2.0);
    const SupportField t = translated_ball(g, 1.0, 0.3);
    const auto zexp = default_z_exponents(p);
    const DiagnosticsRecord d = diagnose(t, p, zexp, 0.5, 0.25);
    CHECK(d.t == 0.5);
    CHECK(d.tau == 0.25);
    CHECK(d.Z.size() == 4);
    CHECK(d.R == Catch::Approx(d.umax / d.umin));
    CHECK(d.eta == Catch::Approx(eta(t, p)).epsilon(1e-12));
    CHECK(d.J == Catch::Approx(J_functional(t, p)).epsilon(1e-12));
    CHECK(d.Z[0] == Catch::Approx(d.J).epsilon(1e-12));
    CHECK(std::abs(d.lambda_min - 1.0) < 1e-5);
    CHECK(std::abs(d.lambda_max - 1.0) < 1e-5);
    // |u'|/u = 0.3 sin / (1 + 0.3 cos), maximal where cos = -0.3
    CHECK(std::abs(d.gradmax - 0.3 / std::sqrt(1 - 0.09)) < 1e-4);
    const Extrema q = extrema(rho_field(t, p));
    CHECK(d.Q_min == q.min);
    CHECK(d.Q_max == q.max);
}
