#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "groupsparse/error.hpp"
#include "groupsparse/matrix.hpp"

namespace groupsparse {

/// In-place complex FFT. Radix-2 for power-of-two sizes; other sizes fall
/// back to a direct DFT and are flagged slow.
class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        require(n >= 1, errc::invalid_argument, "fft: size must be >= 1");
        fast_ = (n & (n - 1)) == 0;
        if (fast_) {
            twiddle_.resize(n / 2);
            for (std::size_t k = 0; k < n / 2; ++k) {
                double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
                twiddle_[k] = {std::cos(ang), std::sin(ang)};
            }
        }
    }

    std::size_t size() const { return n_; }
    bool fast() const { return fast_; }

    void forward(std::complex<double>* a) const { transform(a, false); }

    void inverse(std::complex<double>* a) const {
        transform(a, true);
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] *= s;
    }

  private:
    void transform(std::complex<double>* a, bool inv) const {
        if (!fast_) {
            dft(a, inv);
            return;
        }
        // Bit-reversal permutation.
        for (std::size_t i = 1, j = 0; i < n_; ++i) {
            std::size_t bit = n_ >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t step = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    std::complex<double> w = twiddle_[k * step];
                    if (inv) w = std::conj(w);
                    auto u = a[i + k];
                    auto t = a[i + k + len / 2] * w;
                    a[i + k] = u + t;
                    a[i + k + len / 2] = u - t;
                }
            }
        }
    }

    void dft(std::complex<double>* a, bool inv) const {
        std::vector<std::complex<double>> out(n_);
        const double sign = inv ? 1.0 : -1.0;
        for (std::size_t k = 0; k < n_; ++k) {
            std::complex<double> s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                double ang = sign * 2.0 * M_PI * static_cast<double>(k * j % n_) /
                             static_cast<double>(n_);
                s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            out[k] = s;
        }
        for (std::size_t k = 0; k < n_; ++k) a[k] = out[k];
    }

    std::size_t n_;
    bool fast_ = true;
    std::vector<std::complex<double>> twiddle_;
};

/// Signed wavenumber of Fourier mode j on a periodic domain of length l.
inline double fourier_wavenumber(std::size_t j, std::size_t n, double l) {
    const long half = static_cast<long>(n) / 2;
    long f = static_cast<long>(j);
    if (f > half) f -= static_cast<long>(n);
    return 2.0 * M_PI * static_cast<double>(f) / l;
}

/// Differentiates periodic samples by Fourier multipliers (ik)^order. The
/// Nyquist mode is zeroed for odd orders.
inline Vector spectral_derivative(const Vector& values, double length, std::size_t order) {
    require(order >= 1 && order <= 2, errc::invalid_argument,
            "spectral_derivative: order must be 1 or 2");
    require(length > 0.0, errc::invalid_argument, "spectral_derivative: length must be positive");
    const std::size_t n = values.size();
    Fft fft(n);
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = values[i];
    fft.forward(a.data());
    for (std::size_t j = 0; j < n; ++j) {
        const double k = fourier_wavenumber(j, n, length);
        if (order == 1) {
            if (n % 2 == 0 && j == n / 2) {
                a[j] = 0.0;
            } else {
                a[j] *= std::complex<double>(0.0, k);
            }
        } else {
            a[j] *= -k * k;
        }
    }
    fft.inverse(a.data());
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
    return out;
}

/// Spectral derivative along one axis of a 2D slice stored x-fastest
/// (index iy*nx + ix). axis 0 = x, axis 1 = y.
inline Vector spectral_derivative_2d(const Vector& slice, std::size_t nx, std::size_t ny,
                                     double lx, double ly, std::size_t axis, std::size_t order) {
    require(slice.size() == nx * ny, errc::dimension_mismatch,
            "spectral_derivative_2d: slice size mismatch");
    Vector out(slice.size(), 0.0);
    if (axis == 0) {
        Vector line(nx);
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) line[ix] = slice[iy * nx + ix];
            Vector d = spectral_derivative(line, lx, order);
            for (std::size_t ix = 0; ix < nx; ++ix) out[iy * nx + ix] = d[ix];
        }
    } else {
        Vector line(ny);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t iy = 0; iy < ny; ++iy) line[iy] = slice[iy * nx + ix];
            Vector d = spectral_derivative(line, ly, order);
            for (std::size_t iy = 0; iy < ny; ++iy) out[iy * nx + ix] = d[iy];
        }
    }
    return out;
}

/// Workspace for repeated 2D Laplacians on a fixed grid (the inner loop of
/// the reaction-diffusion stepper).
class SpectralLaplacian2d {
  public:
    SpectralLaplacian2d(std::size_t nx, std::size_t ny, double lx, double ly)
        : nx_(nx), ny_(ny), fx_(nx), fy_(ny), ksq_x_(nx), ksq_y_(ny), buf_(nx * ny),
          line_(std::max(nx, ny)) {
        for (std::size_t j = 0; j < nx; ++j) {
            double k = fourier_wavenumber(j, nx, lx);
            ksq_x_[j] = -k * k;
        }
        for (std::size_t j = 0; j < ny; ++j) {
            double k = fourier_wavenumber(j, ny, ly);
            ksq_y_[j] = -k * k;
        }
    }

    void apply(const Vector& slice, Vector& out) {
        // Full 2D transform, multiply by -(kx^2 + ky^2), transform back.
        for (std::size_t i = 0; i < nx_ * ny_; ++i) buf_[i] = slice[i];
        for (std::size_t iy = 0; iy < ny_; ++iy) fx_.forward(buf_.data() + iy * nx_);
        for (std::size_t ix = 0; ix < nx_; ++ix) {
            for (std::size_t iy = 0; iy < ny_; ++iy) line_[iy] = buf_[iy * nx_ + ix];
            fy_.forward(line_.data());
            for (std::size_t iy = 0; iy < ny_; ++iy)
                line_[iy] *= ksq_x_[ix] + ksq_y_[iy];
            fy_.inverse(line_.data());
            for (std::size_t iy = 0; iy < ny_; ++iy) buf_[iy * nx_ + ix] = line_[iy];
        }
        for (std::size_t iy = 0; iy < ny_; ++iy) fx_.inverse(buf_.data() + iy * nx_);
        out.resize(nx_ * ny_);
        for (std::size_t i = 0; i < nx_ * ny_; ++i) out[i] = buf_[i].real();
    }

  private:
    std::size_t nx_, ny_;
    Fft fx_, fy_;
    Vector ksq_x_, ksq_y_;
    std::vector<std::complex<double>> buf_;
    std::vector<std::complex<double>> line_;
};

}  // namespace groupsparse
