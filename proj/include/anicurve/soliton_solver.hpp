// Self-similar solutions: f u^(alpha-1) sigma_k^beta = c solved by damped
// Newton iteration on the node values of u.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/functionals.hpp"

namespace anicurve {

struct SolitonProblem {
    FlowParams p;
    double c = 1.0;
    std::optional<ScalarField> init;  // nullopt selects the round guess

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("soliton constant c must be positive");
        if (p.q() > 1e-12) {
            throw std::domain_error("soliton solver supports alpha <= 1 - k beta only");
        }
    }
};

struct SolitonSolution {
    SupportField u;
    double c;
    double residual_sup;
    int iterations;
};

/// Thrown when the iteration stops making progress; carries the last iterate.
class NewtonStagnation : public std::runtime_error {
public:
    NewtonStagnation(const std::string& what, ScalarField last, double residual)
        : std::runtime_error(what), last_(std::move(last)), residual_(residual) {}
    [[nodiscard]] const ScalarField& last_iterate() const { return last_; }
    [[nodiscard]] double residual_sup() const { return residual_; }

private:
    ScalarField last_;
    double residual_;
};

namespace detail {

inline std::optional<ScalarField> soliton_residual(const ScalarField& u, const ScalarField& f, const FlowParams& p,
                                                   double c) {
    const ScalarField sk = sigma_k(curvature_matrix(u), p.k);
    ScalarField r(u.grid());
    for (int i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0) || !(sk[i] > 0.0)) return std::nullopt;
        r[i] = f[i] * std::pow(u[i], p.alpha - 1.0) * std::pow(sk[i], p.beta) - c;
    }
    return r;
}

inline double sup_abs(const ScalarField& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double mean_of(const ScalarField& g) {
    return integrate(g) / kSphereArea;
}

}  // namespace detail

/// Node-wise f u^(alpha-1) sigma_k^beta - c.
inline ScalarField residual(const SupportField& u, const SolitonProblem& prob) {
    require_convex(u.field(), "residual");
    return *detail::soliton_residual(u.field(), prob.p.f.on(u.grid()), prob.p, prob.c);
}

/// Round body solving the equation with f replaced by its mean.
inline ScalarField round_soliton_guess(const Grid& grid, const FlowParams& p, double c) {
    const double fbar = detail::mean_of(p.f.on(grid));
    const double r0 = std::pow((c / fbar) * std::pow(binomial_2(p.k), -p.beta), 1.0 / (p.q()));
    return ScalarField(grid, r0);
}

struct NewtonOptions {
    double tol_factor = 1e-10;  // stop when sup |residual| < tol_factor * c
    int max_iterations = 100;
    int max_halvings = 40;
};

inline SolitonSolution solve(const Grid& grid, const SolitonProblem& prob, const NewtonOptions& opt = {}) {
    prob.validate();
    const FlowParams& p = prob.p;
    if (p.k < 2 && !(check_f_condition(grid, p) > 0.0)) {
        throw std::domain_error(
            "anisotropy fails the positivity condition Hess g + g I > 0 with g = f^(1/(1+k beta-alpha))");
    }
    const ScalarField f = p.f.on(grid);
    ScalarField u = prob.init ? *prob.init : round_soliton_guess(grid, p, prob.c);
    if (!(convexity_margin(u) > 0.0)) throw std::domain_error("soliton initial guess is not uniformly convex");

    auto res = detail::soliton_residual(u, f, p, prob.c);
    if (!res) throw std::domain_error("soliton residual undefined at the initial guess");
    const int n = u.size();
    const double tol = opt.tol_factor * prob.c;

    for (int it = 0; it <= opt.max_iterations; ++it) {
        const double rs = detail::sup_abs(*res);
        if (rs < tol) return {SupportField(u), prob.c, rs, it};
        if (it == opt.max_iterations) break;

        Eigen::MatrixXd Jac(n, n);
        ScalarField probe(u);
        for (int j = 0; j < n; ++j) {
            const double eps = 1e-7 * std::max(1.0, std::abs(u[j]));
            probe[j] = u[j] + eps;
            const auto rj = detail::soliton_residual(probe, f, p, prob.c);
            probe[j] = u[j];
            if (!rj) throw NewtonStagnation("Jacobian probe left the admissible cone", u, rs);
            for (int i = 0; i < n; ++i) Jac(i, j) = ((*rj)[i] - (*res)[i]) / eps;
        }
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b(i) = -(*res)[i];
        const Eigen::VectorXd delta = Jac.partialPivLu().solve(b);

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
            ScalarField trial(u);
            for (int i = 0; i < n; ++i) trial[i] += lambda * delta(i);
            if (!(convexity_margin(trial) > 0.0)) continue;
            auto rt = detail::soliton_residual(trial, f, p, prob.c);
            if (!rt) continue;
            if (detail::sup_abs(*rt) < rs || detail::sup_abs(*rt) < tol) {
                u = std::move(trial);
                res = std::move(rt);
                accepted = true;
                break;
            }
        }
        if (!accepted) throw NewtonStagnation("Newton line search failed to reduce the residual", u, rs);
    }
    throw NewtonStagnation("Newton iteration limit reached", u, detail::sup_abs(*res));
}

/// Rescales a solution so that the integral of u sigma_k equals |S^2|;
/// s u solves the equation with constant s^(alpha-1+k beta) c.
inline SolitonSolution normalize_soliton(const SolitonSolution& sol, const FlowParams& p) {
    const double V = quermass_volume(sol.u.field(), p.k);
    const double s = std::pow(kSphereArea / V, 1.0 / (p.k + 1));
    return {SupportField(s * sol.u.field()), std::pow(s, p.q()) * sol.c, sol.residual_sup, sol.iterations};
}

/// Max pairwise sup distance between solutions from randomized starts.
/// Solves tighter than the default stopping rule so that the returned
/// distance measures non-uniqueness rather than Newton tolerance.
inline double uniqueness_check(const Grid& grid, const SolitonProblem& prob, int trials, std::uint64_t seed = 0,
                               NewtonOptions opt = {1e-12, 100, 40}) {
    prob.validate();
    if (!(prob.p.q() < 0.0) || prob.p.regime() == Regime::critical) {
        throw std::domain_error("uniqueness holds only for alpha < 1 - k beta (critical case: unique up to dilation)");
    }
    if (trials < 2) throw std::invalid_argument("uniqueness_check needs at least 2 trials");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.8, 1.25);
    std::uniform_real_distribution<double> amp(-0.08, 0.08);
    const ScalarField base = round_soliton_guess(grid, prob.p, prob.c);

    std::vector<ScalarField> sols;
    for (int t = 0; t < trials; ++t) {
        ScalarField guess(grid);
        do {
            const double s = scale(rng), a1 = amp(rng), a2 = amp(rng);
            guess = ScalarField::sample(grid, [&](double th) {
                const double x = std::cos(th);
                return s * base[0] * (1.0 + a1 * x + a2 * 0.5 * (3.0 * x * x - 1.0));
            });
        } while (!(convexity_margin(guess) > 0.0));
        SolitonProblem trial = prob;
        trial.init = guess;
        sols.push_back(solve(grid, trial, opt).u.field());
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < sols.size(); ++a) {
        for (std::size_t b = a + 1; b < sols.size(); ++b) worst = std::max(worst, detail::sup_abs(sols[a] - sols[b]));
    }
    return worst;
}

}  // namespace anicurve
