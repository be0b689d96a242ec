#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "groupsparse/error.hpp"
#include "groupsparse/linalg.hpp"
#include "groupsparse/matrix.hpp"

namespace groupsparse {

/// Local least-squares (Savitzky-Golay style) differentiation parameters.
struct DerivativeSpec {
    std::size_t window = 11;  // odd, >= 5
    std::size_t degree = 4;   // 2 <= degree < window

    void validate() const {
        require(window >= 5 && window % 2 == 1, errc::invalid_argument,
                "derivative window must be odd and >= 5");
        require(degree >= 2 && degree < window, errc::invalid_argument,
                "derivative degree must satisfy 2 <= degree < window");
    }
};

/// Weights w such that w . y estimates the order-th derivative at offset 0
/// of a degree-`degree` polynomial least-squares fit through samples at the
/// given integer offsets (times `spacing`).
inline Vector polyfit_weights(const std::vector<int>& offsets, std::size_t degree,
                              std::size_t order, double spacing) {
    const std::size_t w = offsets.size();
    const std::size_t nb = degree + 1;
    require(order <= degree, errc::invalid_argument, "derivative order exceeds fit degree");
    require(w >= nb, errc::invalid_argument, "window smaller than number of basis terms");

    // Scale offsets to O(1) for conditioning of the normal equations.
    double scale = 1.0;
    for (int o : offsets) scale = std::max(scale, std::abs(static_cast<double>(o)));
    DenseMatrix v(w, nb);
    for (std::size_t i = 0; i < w; ++i) {
        double xi = static_cast<double>(offsets[i]) / scale;
        double p = 1.0;
        for (std::size_t a = 0; a < nb; ++a) {
            v(i, a) = p;
            p *= xi;
        }
    }
    DenseMatrix g(nb, nb);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < w; ++i) s += v(i, a) * v(i, b);
            g(a, b) = s;
        }
    Vector e(nb, 0.0);
    e[order] = 1.0;
    require(cholesky_solve(std::move(g), e), errc::invalid_argument,
            "polyfit weights: singular normal equations");
    // w_i = (V (G^-1 e_order))_i, rescaled to the physical axis.
    double fact = 1.0;
    for (std::size_t k = 2; k <= order; ++k) fact *= static_cast<double>(k);
    const double unit = fact / std::pow(scale * spacing, static_cast<double>(order));
    Vector out(w, 0.0);
    for (std::size_t i = 0; i < w; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < nb; ++a) s += v(i, a) * e[a];
        out[i] = s * unit;
    }
    return out;
}

/// Precomputed weight table for one (spec, order, spacing) triple. Windows
/// keep their full width near the ends of the series by shifting sideways,
/// so the key is the window start relative to the evaluation point.
class PolyfitFilter {
  public:
    PolyfitFilter(DerivativeSpec spec, std::size_t order, double spacing)
        : spec_(spec), order_(order), spacing_(spacing) {
        spec_.validate();
        require(spacing > 0.0, errc::invalid_argument, "spacing must be positive");
    }

    std::size_t window() const { return spec_.window; }
    std::size_t half() const { return spec_.window / 2; }

    /// Derivative estimate at position i of a series of length n.
    double eval(const double* y, std::size_t n, std::size_t i) const {
        const std::size_t start = window_start(i, n);
        const Vector& w = weights(static_cast<long>(start) - static_cast<long>(i));
        double s = 0.0;
        for (std::size_t j = 0; j < spec_.window; ++j) s += w[j] * y[start + j];
        return s;
    }

    /// Same, for a strided line (field axis access).
    double eval_strided(const double* y, std::size_t stride, std::size_t n, std::size_t i) const {
        const std::size_t start = window_start(i, n);
        const Vector& w = weights(static_cast<long>(start) - static_cast<long>(i));
        double s = 0.0;
        for (std::size_t j = 0; j < spec_.window; ++j) s += w[j] * y[(start + j) * stride];
        return s;
    }

    std::size_t window_start(std::size_t i, std::size_t n) const {
        require(n >= spec_.window, errc::invalid_argument, "series shorter than window");
        const std::size_t h = half();
        if (i < h) return 0;
        if (i + h >= n) return n - spec_.window;
        return i - h;
    }

  private:
    const Vector& weights(long left) const {
        auto it = cache_.find(left);
        if (it != cache_.end()) return it->second;
        std::vector<int> offsets(spec_.window);
        for (std::size_t j = 0; j < spec_.window; ++j)
            offsets[j] = static_cast<int>(left + static_cast<long>(j));
        auto [pos, ok] = cache_.emplace(left, polyfit_weights(offsets, spec_.degree, order_, spacing_));
        return pos->second;
    }

    DerivativeSpec spec_;
    std::size_t order_;
    double spacing_;
    mutable std::map<long, Vector> cache_;
};

/// Pointwise derivative of a sampled series by local polynomial fits
/// (centered windows, shifted one-sided at the boundaries).
inline Vector polyfit_derivative(const Vector& series, double spacing, const DerivativeSpec& spec,
                                 std::size_t order) {
    spec.validate();
    require(series.size() >= spec.window, errc::invalid_argument,
            "polyfit_derivative: series shorter than window");
    require(order <= spec.degree, errc::invalid_argument,
            "polyfit_derivative: order exceeds degree");
    PolyfitFilter f(spec, order, spacing);
    Vector out(series.size(), 0.0);
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = f.eval(series.data(), series.size(), i);
    return out;
}

}  // namespace groupsparse
