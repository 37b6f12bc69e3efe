// Discrete calculus on the axisymmetric unit sphere S^2.
//
// Fields depend on the polar angle only. The grid holds N interior nodes
// theta_i = (i+1) h with h = pi/(N+1); the poles sit one spacing outside
// either end and are reached only through parity ghost values.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anicurve {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSphereArea = 4.0 * kPi;
inline constexpr int kMinGridNodes = 16;

/// Symmetry of the smooth extension of a field across theta = 0 and theta = pi.
enum class Parity { even, odd };

class Grid {
public:
    /// Uniform interior grid with N nodes; throws std::invalid_argument for N < 16.
    static Grid make(int N) {
        if (N < kMinGridNodes) {
            throw std::invalid_argument("grid needs at least " + std::to_string(kMinGridNodes) +
                                        " nodes, got " + std::to_string(N));
        }
        auto d = std::make_shared<Data>();
        d->h = kPi / static_cast<double>(N + 1);
        d->theta.resize(N);
        d->sin.resize(N);
        d->cos.resize(N);
        d->cot.resize(N);
        for (int i = 0; i < N; ++i) {
            const double t = d->h * static_cast<double>(i + 1);
            d->theta[i] = t;
            d->sin[i] = std::sin(t);
            d->cos[i] = std::cos(t);
            d->cot[i] = d->cos[i] / d->sin[i];
        }
        d->weights = fejer_weights(N, d->h);
        return Grid(std::move(d));
    }

    [[nodiscard]] int size() const { return static_cast<int>(data_->theta.size()); }
    [[nodiscard]] double h() const { return data_->h; }
    [[nodiscard]] double theta(int i) const { return data_->theta[i]; }
    [[nodiscard]] std::span<const double> thetas() const { return data_->theta; }
    [[nodiscard]] std::span<const double> sin_theta() const { return data_->sin; }
    [[nodiscard]] std::span<const double> cos_theta() const { return data_->cos; }
    [[nodiscard]] std::span<const double> cot_theta() const { return data_->cot; }
    /// Quadrature weights including the 2 pi sin(theta) Jacobian.
    [[nodiscard]] std::span<const double> area_weights() const { return data_->weights; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.data_ == b.data_ || (a.size() == b.size() && a.h() == b.h());
    }

private:
    struct Data {
        double h = 0.0;
        std::vector<double> theta, sin, cos, cot, weights;
    };

    explicit Grid(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

    // Fejer's second rule in x = cos(theta): the interior nodes are exactly
    // its abscissae, so no pole values enter and smooth axisymmetric fields
    // integrate spectrally.
    static std::vector<double> fejer_weights(int N, double h) {
        const int n = N + 1;
        std::vector<double> w(N);
        for (int i = 0; i < N; ++i) {
            const double t = h * static_cast<double>(i + 1);
            double sum = 0.0;
            for (int j = 1; j <= n / 2; ++j) sum += std::sin((2 * j - 1) * t) / (2 * j - 1);
            w[i] = 2.0 * kPi * 4.0 * std::sin(t) / n * sum;
        }
        return w;
    }

    std::shared_ptr<const Data> data_;
};

/// One real per grid node.
class ScalarField {
public:
    explicit ScalarField(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
    ScalarField(Grid grid, double value) : grid_(std::move(grid)), values_(grid_.size(), value) {}
    ScalarField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.size()) {
            throw std::invalid_argument("field size does not match grid");
        }
    }

    /// Samples fn(theta) at every node.
    template <class Fn>
    static ScalarField sample(const Grid& grid, Fn&& fn) {
        ScalarField out(grid);
        for (int i = 0; i < grid.size(); ++i) out.values_[i] = fn(grid.theta(i));
        return out;
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] int size() const { return static_cast<int>(values_.size()); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    double& operator[](int i) { return values_[i]; }
    double operator[](int i) const { return values_[i]; }

    [[nodiscard]] bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    template <class Fn>
    [[nodiscard]] ScalarField map(Fn&& fn) const {
        ScalarField out(grid_);
        for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
        return out;
    }

    ScalarField& operator+=(const ScalarField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(ScalarField a, const ScalarField& b) {
        for (std::size_t i = 0; i < a.values_.size(); ++i) a.values_[i] *= b.values_[i];
        return a;
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

namespace detail {

// Value of an even field at a pole from the three nearest nodes, fitting
// a + b s^2 + c s^4 in the distance s to the pole.
inline double even_pole_value(double u1, double u2, double u3) { return 1.5 * u1 - 0.6 * u2 + 0.1 * u3; }

// Field padded with two ghost values on each side: index j of the result
// corresponds to node j - 2, so positions 1 and N+2 are the poles.
inline std::vector<double> padded(std::span<const double> u, Parity parity) {
    const int n = static_cast<int>(u.size());
    std::vector<double> ext(static_cast<std::size_t>(n) + 4);
    std::copy(u.begin(), u.end(), ext.begin() + 2);
    if (parity == Parity::even) {
        ext[0] = u[0];
        ext[1] = even_pole_value(u[0], u[1], u[2]);
        ext[n + 2] = even_pole_value(u[n - 1], u[n - 2], u[n - 3]);
        ext[n + 3] = u[n - 1];
    } else {
        ext[0] = -u[0];
        ext[1] = 0.0;
        ext[n + 2] = 0.0;
        ext[n + 3] = -u[n - 1];
    }
    return ext;
}

}  // namespace detail

/// Values of an even field at theta = 0 and theta = pi.
inline std::pair<double, double> pole_values(const ScalarField& u) {
    const int n = u.size();
    return {detail::even_pole_value(u[0], u[1], u[2]), detail::even_pole_value(u[n - 1], u[n - 2], u[n - 3])};
}

/// Fourth-order centered derivative in theta of order 1 or 2.
inline ScalarField differentiate(const ScalarField& u, int order, Parity parity) {
    if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
    const int n = u.size();
    const double h = u.grid().h();
    const std::vector<double> e = detail::padded(u.values(), parity);
    ScalarField out(u.grid());
    if (order == 1) {
        const double s = 1.0 / (12.0 * h);
        for (int i = 0; i < n; ++i) {
            const int j = i + 2;
            out[i] = s * (-e[j + 2] + 8.0 * e[j + 1] - 8.0 * e[j - 1] + e[j - 2]);
        }
    } else {
        const double s = 1.0 / (12.0 * h * h);
        for (int i = 0; i < n; ++i) {
            const int j = i + 2;
            out[i] = s * (-e[j + 2] + 16.0 * e[j + 1] - 30.0 * e[j] + 16.0 * e[j - 1] - e[j - 2]);
        }
    }
    return out;
}

/// Approximates the surface integral over S^2 of an axisymmetric field.
inline double integrate(const ScalarField& g) {
    const auto w = g.grid().area_weights();
    double sum = 0.0;
    for (int i = 0; i < g.size(); ++i) sum += w[i] * g[i];
    return sum;
}

struct Extrema {
    double min;
    double max;
};

inline Extrema extrema(const ScalarField& g) {
    const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
    return {*lo, *hi};
}

}  // namespace anicurve
