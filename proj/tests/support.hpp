// Shared helpers for the unit tests: norms and a seeded generator of
// uniformly convex axisymmetric bodies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "anicurve/convex_body.hpp"
#include "anicurve/counterexample_lab.hpp"
#include "anicurve/sphere_calculus.hpp"

namespace testing_support {

using namespace anicurve;

inline double sup_abs(const ScalarField& g) {
    double m = 0.0;
    for (double v : g.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_diff(const ScalarField& a, const ScalarField& b) { return sup_abs(a - b); }

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }

private:
    std::mt19937_64 eng_;
};

/// Legendre-type perturbations of a ball, rejected until uniformly convex
/// with margin at least `min_margin`.
class BodyGenerator {
public:
    explicit BodyGenerator(std::uint64_t seed) : rng_(seed) {}

    SupportField next(const Grid& g, double min_margin = 0.05) {
        std::uniform_real_distribution<double> radius(0.5, 2.0);
        std::uniform_real_distribution<double> amp(-0.12, 0.12);
        while (true) {
            const double r = radius(rng_);
            const double a1 = amp(rng_) * 3.0, a2 = amp(rng_), a3 = amp(rng_), a4 = amp(rng_) * 0.5;
            ScalarField u = ScalarField::sample(g, [&](double t) {
                const double x = std::cos(t);
                const double p2 = 0.5 * (3 * x * x - 1);
                const double p3 = 0.5 * (5 * x * x * x - 3 * x);
                const double p4 = (35 * x * x * x * x - 30 * x * x + 3) / 8.0;
                return r * (1.0 + a1 * x + a2 * p2 + a3 * p3 + a4 * p4);
            });
            bool positive = std::all_of(u.values().begin(), u.values().end(), [](double v) { return v > 0.0; });
            if (positive && convexity_margin(u) > min_margin * r) return SupportField(std::move(u));
        }
    }

private:
    std::mt19937_64 rng_;
};

/// Twenty admissible sub-solution parameter sets spanning both sigma orders.
inline std::vector<SubsolutionParams> subsolution_sweep() {
    std::vector<SubsolutionParams> out;
    for (double alpha : {0.6, 0.9, 1.0, 1.2, 1.4}) {
        for (int k : {1, 2}) {
            for (double beta : {0.8, 1.5}) {
                for (double scale : {1.3, 2.0, 4.0}) {
                    const double q = k * beta + alpha - 1.0;
                    if (q <= 0.0) continue;
                    const double theta = scale / q;
                    if ((q * theta - 1.0) / (k * beta * theta) >= 1.0) continue;
                    out.push_back(SubsolutionParams::make(alpha, k, beta, theta));
                    if (out.size() == 20) return out;
                }
            }
        }
    }
    return out;
}

}  // namespace testing_support
