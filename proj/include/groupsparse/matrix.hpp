#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "groupsparse/error.hpp"

namespace groupsparse {

using Vector = std::vector<double>;

/// Dense row-major matrix. The only storage type in the library; all
/// dictionaries, subsamples and solver workspaces are built on it.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2_sq(const Vector& v) { return dot(v, v); }

inline double norm2(const Vector& v) { return std::sqrt(norm2_sq(v)); }

inline Vector matvec(const DenseMatrix& a, const Vector& x) {
    require(x.size() == a.cols, errc::dimension_mismatch, "matvec: x length != cols");
    Vector y(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline Vector matvec_transposed(const DenseMatrix& a, const Vector& x) {
    require(x.size() == a.rows, errc::dimension_mismatch, "matvec_transposed: x length != rows");
    Vector y(a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* r = a.row(i);
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < a.cols; ++j) y[j] += r[j] * xi;
    }
    return y;
}

}  // namespace groupsparse
