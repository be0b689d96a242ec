#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "groupsparse/error.hpp"
#include "groupsparse/matrix.hpp"
#include "groupsparse/rng.hpp"

namespace groupsparse {

/// Thrown when an iterative method hits its cap; carries the best value seen.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double best)
        : Error(errc::no_convergence, what), best_estimate_(best) {}
    double best_estimate() const noexcept { return best_estimate_; }

  private:
    double best_estimate_;
};

namespace detail {

// Applies one Householder reflection defined by column k of qr (rows k..m-1)
// to the vector segment w[k..m-1]. diag_v holds the v0 entries.
inline void apply_householder(const DenseMatrix& qr, const std::vector<double>& v0s,
                              std::size_t k, Vector& w) {
    const std::size_t m = qr.rows;
    const double v0 = v0s[k];
    if (v0 == 0.0) return;
    double s = v0 * w[k];
    for (std::size_t i = k + 1; i < m; ++i) s += qr(i, k) * w[i];
    const double alpha = qr(k, k);
    const double inv = -1.0 / (alpha * v0);
    const double f = s * inv;
    w[k] -= f * v0;
    for (std::size_t i = k + 1; i < m; ++i) w[i] -= f * qr(i, k);
}

}  // namespace detail

/// Least squares min ||Ax - b||_2 by Householder QR with column pivoting.
/// Rank-deficient systems fall through to a complete orthogonal
/// decomposition and return the minimum-norm solution.
inline Vector least_squares(const DenseMatrix& a, const Vector& b) {
    require(a.rows >= 1 && a.cols >= 1, errc::invalid_argument, "least_squares: empty matrix");
    require(a.rows == b.size(), errc::dimension_mismatch, "least_squares: rows != b length");
    require(a.all_finite() && all_finite(b), errc::non_finite, "least_squares: non-finite input");

    const std::size_t m = a.rows;
    const std::size_t n = a.cols;
    DenseMatrix r = a;
    Vector c = b;
    std::vector<std::size_t> piv(n);
    for (std::size_t j = 0; j < n; ++j) piv[j] = j;
    std::vector<double> v0s(n, 0.0);  // leading entries of the Householder vectors

    const std::size_t kmax = std::min(m, n);
    std::size_t rank = kmax;
    for (std::size_t k = 0; k < kmax; ++k) {
        // Pivot on the column with the largest remaining norm.
        std::size_t best = k;
        double best_sq = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t i = k; i < m; ++i) sq += r(i, j) * r(i, j);
            if (sq > best_sq) {
                best_sq = sq;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, best));
            std::swap(piv[k], piv[best]);
        }
        const double normx = std::sqrt(best_sq);
        if (normx == 0.0) {
            rank = k;
            break;
        }
        const double x0 = r(k, k);
        const double alpha = x0 >= 0.0 ? -normx : normx;
        const double v0 = x0 - alpha;
        r(k, k) = alpha;
        v0s[k] = v0;
        // v = [v0, r(k+1..m-1, k)]; H = I + v v^T / (alpha v0).
        const double inv = -1.0 / (alpha * v0);
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = v0 * r(k, j);
            for (std::size_t i = k + 1; i < m; ++i) s += r(i, k) * r(i, j);
            const double f = s * inv;
            r(k, j) -= f * v0;
            for (std::size_t i = k + 1; i < m; ++i) r(i, j) -= f * r(i, k);
        }
        {
            double s = v0 * c[k];
            for (std::size_t i = k + 1; i < m; ++i) s += r(i, k) * c[i];
            const double f = s * inv;
            c[k] -= f * v0;
            for (std::size_t i = k + 1; i < m; ++i) c[i] -= f * r(i, k);
        }
    }

    // Numerical rank from the pivoted diagonal.
    const double tol = static_cast<double>(std::max(m, n)) *
                       std::numeric_limits<double>::epsilon() * std::abs(r(0, 0));
    std::size_t eff_rank = 0;
    while (eff_rank < rank && std::abs(r(eff_rank, eff_rank)) > tol) ++eff_rank;

    Vector x(n, 0.0);
    if (eff_rank == 0) return x;

    if (eff_rank == n) {
        // Full column rank: back substitution.
        Vector y(n, 0.0);
        for (std::size_t k = n; k-- > 0;) {
            double s = c[k];
            for (std::size_t j = k + 1; j < n; ++j) s -= r(k, j) * y[j];
            y[k] = s / r(k, k);
        }
        for (std::size_t j = 0; j < n; ++j) x[piv[j]] = y[j];
        return x;
    }

    // Rank deficient: QR of T^T where T = leading eff_rank rows of R, then
    // the minimum-norm solution is z = Q2 * [R2^{-T} c_r ; 0].
    const std::size_t rr = eff_rank;
    DenseMatrix tt(n, rr);  // T^T, will hold Householder vectors below its diagonal
    for (std::size_t i = 0; i < rr; ++i)
        for (std::size_t j = 0; j < n; ++j) tt(j, i) = j >= i ? r(i, j) : 0.0;
    std::vector<double> v0s2(rr, 0.0);
    for (std::size_t k = 0; k < rr; ++k) {
        double sq = 0.0;
        for (std::size_t i = k; i < n; ++i) sq += tt(i, k) * tt(i, k);
        const double normx = std::sqrt(sq);
        if (normx == 0.0) continue;
        const double x0 = tt(k, k);
        const double alpha = x0 >= 0.0 ? -normx : normx;
        const double v0 = x0 - alpha;
        tt(k, k) = alpha;
        v0s2[k] = v0;
        const double inv = -1.0 / (alpha * v0);
        for (std::size_t j = k + 1; j < rr; ++j) {
            double s = v0 * tt(k, j);
            for (std::size_t i = k + 1; i < n; ++i) s += tt(i, k) * tt(i, j);
            const double f = s * inv;
            tt(k, j) -= f * v0;
            for (std::size_t i = k + 1; i < n; ++i) tt(i, j) -= f * tt(i, k);
        }
    }
    // Forward substitution on R2^T w = c_r (R2 is upper triangular rr x rr).
    Vector w(rr, 0.0);
    for (std::size_t k = 0; k < rr; ++k) {
        double s = c[k];
        for (std::size_t j = 0; j < k; ++j) s -= tt(j, k) * w[j];
        w[k] = s / tt(k, k);
    }
    Vector z(n, 0.0);
    for (std::size_t k = 0; k < rr; ++k) z[k] = w[k];
    for (std::size_t k = rr; k-- > 0;) detail::apply_householder(tt, v0s2, k, z);
    for (std::size_t j = 0; j < n; ++j) x[piv[j]] = z[j];
    return x;
}

struct PowerIterationResult {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of A^T A by power iteration. Deterministic: the start
/// vector comes from a fixed-seed generator.
inline PowerIterationResult power_iteration_gram(const DenseMatrix& a, double tol,
                                                 std::size_t max_iter) {
    Rng rng(0x5eedULL);
    Vector v(a.cols);
    for (auto& x : v) x = 0.5 + rng.next_double();
    double nv = norm2(v);
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    PowerIterationResult res;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vector av = matvec(a, v);
        double next = norm2_sq(av);  // Rayleigh quotient of A^T A at unit v
        Vector w = matvec_transposed(a, av);
        double nw = norm2(w);
        if (nw == 0.0) return {0.0, it, true};
        for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nw;
        res.iterations = it;
        if (it > 1 && std::abs(next - lambda) <= tol * std::max(next, 1e-300)) {
            res.value = next;
            res.converged = true;
            return res;
        }
        lambda = next;
    }
    res.value = lambda;
    res.converged = false;
    return res;
}

/// Same iteration applied directly to a symmetric matrix g.
inline PowerIterationResult power_iteration_sym(const DenseMatrix& g, double tol,
                                                std::size_t max_iter) {
    Rng rng(0x5eedULL);
    Vector v(g.cols);
    for (auto& x : v) x = 0.5 + rng.next_double();
    double nv = norm2(v);
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    PowerIterationResult res;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vector w = matvec(g, v);
        double next = dot(v, w);
        double nw = norm2(w);
        if (nw == 0.0) return {0.0, it, true};
        for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nw;
        res.iterations = it;
        if (it > 1 && std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-300)) {
            res.value = next;
            res.converged = true;
            return res;
        }
        lambda = next;
    }
    res.value = lambda;
    res.converged = false;
    return res;
}

/// lambda_max(A^T A) to relative tolerance tol. Throws ConvergenceError
/// (carrying the best estimate) if the iteration cap is hit.
inline double spectral_norm_sq(const DenseMatrix& a, double tol = 1e-6,
                               std::size_t max_iter = 1000) {
    require(a.rows >= 1 && a.cols >= 1, errc::invalid_argument, "spectral_norm_sq: empty matrix");
    require(tol > 0.0, errc::invalid_argument, "spectral_norm_sq: tol must be positive");
    require(a.all_finite(), errc::non_finite, "spectral_norm_sq: non-finite input");
    auto res = power_iteration_gram(a, tol, max_iter);
    if (!res.converged)
        throw ConvergenceError("spectral_norm_sq: power iteration hit the iteration cap",
                               res.value);
    return res.value;
}

struct ColumnNormalization {
    DenseMatrix matrix;                     // unit-norm columns
    Vector scales;                          // original column norms (1 for zero columns)
    std::vector<std::size_t> zero_columns;  // flagged, not fatal
};

/// Rescales every column to unit l2 norm. De-normalization of fitted
/// coefficients is coef / scale.
inline ColumnNormalization normalize_columns(const DenseMatrix& a) {
    ColumnNormalization out;
    out.matrix = a;
    out.scales.assign(a.cols, 1.0);
    for (std::size_t j = 0; j < a.cols; ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) sq += a(i, j) * a(i, j);
        const double nrm = std::sqrt(sq);
        if (nrm == 0.0) {
            out.zero_columns.push_back(j);
            continue;
        }
        out.scales[j] = nrm;
        for (std::size_t i = 0; i < a.rows; ++i) out.matrix(i, j) /= nrm;
    }
    return out;
}

/// In-place Cholesky G = L L^T (lower triangle). Returns false on a
/// non-positive pivot.
inline bool cholesky_factor(DenseMatrix& g) {
    const std::size_t n = g.rows;
    for (std::size_t k = 0; k < n; ++k) {
        double d = g(k, k);
        for (std::size_t j = 0; j < k; ++j) d -= g(k, j) * g(k, j);
        if (!(d > 0.0)) return false;
        const double lkk = std::sqrt(d);
        g(k, k) = lkk;
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = g(i, k);
            for (std::size_t j = 0; j < k; ++j) s -= g(i, j) * g(k, j);
            g(i, k) = s / lkk;
        }
    }
    return true;
}

inline void cholesky_solve_factored(const DenseMatrix& l, Vector& x) {
    const std::size_t n = l.rows;
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * x[j];
        x[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= l(j, i) * x[j];
        x[i] = s / l(i, i);
    }
}

/// Solves SPD system g x = rhs. Returns false (rhs untouched) if the
/// factorization fails.
inline bool cholesky_solve(DenseMatrix g, Vector& rhs) {
    if (!cholesky_factor(g)) return false;
    cholesky_solve_factored(g, rhs);
    return true;
}

}  // namespace groupsparse
