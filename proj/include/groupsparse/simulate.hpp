#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "groupsparse/data.hpp"
#include "groupsparse/error.hpp"
#include "groupsparse/fourier.hpp"
#include "groupsparse/matrix.hpp"

namespace groupsparse {

/// One classical fourth-order Runge-Kutta step with preallocated stages.
class Rk4 {
  public:
    explicit Rk4(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    template <typename Rhs>
    void step(Vector& y, double t, double dt, Rhs&& rhs) {
        const std::size_t n = y.size();
        rhs(t, y, k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
        rhs(t + 0.5 * dt, tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
        rhs(t + 0.5 * dt, tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
        rhs(t + dt, tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

  private:
    Vector k1_, k2_, k3_, k4_, tmp_;
};

template <typename Rhs>
Vector rk4_step(Vector state, double t, double dt, Rhs&& rhs) {
    require(dt > 0.0, errc::invalid_argument, "rk4_step: dt must be positive");
    Rk4 stepper(state.size());
    stepper.step(state, t, dt, rhs);
    return state;
}

/// Synthetic receptor-activation pulse c(t) = amplitude * (t/tau) * e^{1 - t/tau}:
/// zero at t = 0, unique peak of height `amplitude` at t = tau, smooth decay.
inline Vector synth_epor_signal(const Vector& t, double amplitude, double tau) {
    require(tau > 0.0, errc::invalid_argument, "synth_epor_signal: tau must be positive");
    Vector c(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = t[i] / tau;
        c[i] = amplitude * s * std::exp(1.0 - s);
    }
    return c;
}

struct JakStatConfig {
    double k1 = 0.021;
    double k2 = 2.46;
    double k3 = 0.2066;
    double k4 = 0.10658;
    double horizon = 60.0;
    std::size_t n_points = 200;
    std::size_t total_substeps = 2000;  // fixed-step RK4 resolution over the horizon
    double x1_0 = 1.0, x2_0 = 0.0, x3_0 = 0.0, x4_0 = 0.0;
};

/// Four-species signalling cascade with irreversible reactions driven by a
/// measured input c(t) sampled on the output grid (linearly interpolated at
/// RK4 stage times). The weighted mass x1 + x2 + 2 x3 + 2 x4 is conserved.
inline TimeSeriesSet simulate_jak_stat(const JakStatConfig& cfg, const Vector& c) {
    require(cfg.n_points >= 2, errc::invalid_argument, "simulate_jak_stat: need >= 2 points");
    require(c.size() == cfg.n_points, errc::dimension_mismatch,
            "simulate_jak_stat: c must be sampled on the output grid");
    require(cfg.horizon > 0.0, errc::invalid_argument, "simulate_jak_stat: horizon > 0");

    const std::size_t n = cfg.n_points;
    const double dt_out = cfg.horizon / static_cast<double>(n - 1);
    const std::size_t sub = std::max<std::size_t>(1, (cfg.total_substeps + n - 2) / (n - 1));
    const double dt = dt_out / static_cast<double>(sub);

    auto c_at = [&](double time) {
        const double pos = time / dt_out;
        if (pos <= 0.0) return c.front();
        if (pos >= static_cast<double>(n - 1)) return c.back();
        const std::size_t i = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(i);
        return (1.0 - w) * c[i] + w * c[i + 1];
    };

    auto rhs = [&](double time, const Vector& x, Vector& dx) {
        const double ct = c_at(time);
        const double x2sq = x[1] * x[1];
        dx[0] = -cfg.k1 * x[0] * ct + 2.0 * cfg.k4 * x[3];
        dx[1] = cfg.k1 * x[0] * ct - cfg.k2 * x2sq;
        dx[2] = -cfg.k3 * x[2] + 0.5 * cfg.k2 * x2sq;
        dx[3] = cfg.k3 * x[2] - cfg.k4 * x[3];
    };

    TimeSeriesSet out;
    out.t.resize(n);
    for (const char* name : {"x1", "x2", "x3", "x4", "c"})
        out.series.push_back({name, Vector(n, 0.0)});

    Vector x = {cfg.x1_0, cfg.x2_0, cfg.x3_0, cfg.x4_0};
    Rk4 stepper(4);
    for (std::size_t i = 0; i < n; ++i) {
        out.t[i] = dt_out * static_cast<double>(i);
        for (std::size_t s = 0; s < 4; ++s) out.series[s].second[i] = x[s];
        out.series[4].second[i] = c[i];
        if (i + 1 == n) break;
        double t0 = out.t[i];
        for (std::size_t k = 0; k < sub; ++k) {
            stepper.step(x, t0 + dt * static_cast<double>(k), dt, rhs);
            if (!all_finite(x))
                throw Error(errc::non_finite,
                            "simulate_jak_stat: state non-finite near t = " +
                                std::to_string(t0 + dt * static_cast<double>(k + 1)));
        }
    }
    return out;
}

struct AdvectionDiffusionConfig {
    std::size_t nx = 256;
    std::size_t nt = 200;
    double length = 5.0;
    double horizon = 3.0;
    double du = 0.25;
    double dv = 0.5;
    double c_offset = -1.5;  // advection velocity c(x) = c_offset + c_amp cos(2 pi x / L)
    double c_amp = 1.0;
    double dt_max = 2.0e-4;
};

inline Vector advection_velocity(const AdvectionDiffusionConfig& cfg) {
    Vector c(cfg.nx);
    for (std::size_t i = 0; i < cfg.nx; ++i) {
        const double x = cfg.length * static_cast<double>(i) / static_cast<double>(cfg.nx);
        c[i] = cfg.c_offset + cfg.c_amp * std::cos(2.0 * M_PI * x / cfg.length);
    }
    return c;
}

/// Two passively advected, diffusing species on a periodic 1D domain:
/// u_t = -(c u)_x + D_u u_xx and likewise for v. The conservative form keeps
/// the discrete total mass constant in spectral space.
inline SpatioTemporalField simulate_advection_diffusion(const AdvectionDiffusionConfig& cfg) {
    require(cfg.nx >= 8 && cfg.nt >= 2, errc::invalid_argument,
            "simulate_advection_diffusion: grid too small");
    require(cfg.dt_max > 0.0 && cfg.horizon > 0.0 && cfg.length > 0.0, errc::invalid_argument,
            "simulate_advection_diffusion: nonpositive step/extent");

    SpatioTemporalField f;
    f.nx = cfg.nx;
    f.ny = 1;
    f.nt = cfg.nt;
    f.lx = cfg.length;
    f.species = {"u", "v"};
    f.values = {Vector(cfg.nx * cfg.nt, 0.0), Vector(cfg.nx * cfg.nt, 0.0)};
    f.t.resize(cfg.nt);

    const Vector c = advection_velocity(cfg);
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    const double dx = cfg.length / static_cast<double>(cfg.nx);
    if (cmax * cfg.dt_max / dx > 1.0)
        f.notes.push_back("advection CFL heuristic exceeded: |c|max dt/dx = " +
                          std::to_string(cmax * cfg.dt_max / dx));

    // State layout: [u(0..nx-1), v(nx..2nx-1)].
    Vector state(2 * cfg.nx, 0.0);
    for (std::size_t i = 0; i < cfg.nx; ++i) {
        const double x = f.x(i);
        state[i] = std::cos(2.0 * M_PI * x / cfg.length);
        state[cfg.nx + i] = -std::cos(2.0 * M_PI * x / cfg.length);
    }

    Vector cu(cfg.nx, 0.0);
    auto rhs = [&](double, const Vector& y, Vector& dy) {
        for (std::size_t sp = 0; sp < 2; ++sp) {
            const double d = sp == 0 ? cfg.du : cfg.dv;
            const std::size_t off = sp * cfg.nx;
            for (std::size_t i = 0; i < cfg.nx; ++i) cu[i] = c[i] * y[off + i];
            Vector adv = spectral_derivative(cu, cfg.length, 1);
            Vector dif(cfg.nx, 0.0);
            if (d != 0.0) {
                Vector uu(y.begin() + static_cast<long>(off),
                          y.begin() + static_cast<long>(off + cfg.nx));
                dif = spectral_derivative(uu, cfg.length, 2);
            }
            for (std::size_t i = 0; i < cfg.nx; ++i) dy[off + i] = -adv[i] + d * dif[i];
        }
    };

    const double dt_out = cfg.horizon / static_cast<double>(cfg.nt - 1);
    const std::size_t sub =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt_out / cfg.dt_max)));
    const double dt = dt_out / static_cast<double>(sub);

    Rk4 stepper(2 * cfg.nx);
    for (std::size_t it = 0; it < cfg.nt; ++it) {
        f.t[it] = dt_out * static_cast<double>(it);
        for (std::size_t i = 0; i < cfg.nx; ++i) {
            f.values[0][f.index(i, 0, it)] = state[i];
            f.values[1][f.index(i, 0, it)] = state[cfg.nx + i];
        }
        if (it + 1 == cfg.nt) break;
        for (std::size_t k = 0; k < sub; ++k) {
            stepper.step(state, f.t[it] + dt * static_cast<double>(k), dt, rhs);
            if (!all_finite(state))
                throw Error(errc::non_finite,
                            "simulate_advection_diffusion: state non-finite near t = " +
                                std::to_string(f.t[it] + dt * static_cast<double>(k + 1)));
        }
    }
    return f;
}

struct LambdaOmegaConfig {
    std::size_t n = 128;    // grid points per axis
    double length = 20.0;   // domain [-10, 10)^2
    double du = 0.1;
    double dv = 0.1;
    double beta = 1.0;
    double dt = 0.05;
    double horizon = 10.0;
    std::size_t output_every = 1;
    // Initial (u, v) at a point; defaults to the three-armed spiral seed.
    std::function<std::pair<double, double>(double, double)> initial;
};

/// Two-species oscillatory reaction-diffusion system with rotational
/// kinetics lambda(r) = 1 - r^2, omega(r) = -beta r^2 (r^2 = u^2 + v^2):
/// u_t = D_u lap u + lambda u - omega v, v_t = D_v lap v + omega u + lambda v.
/// The spiral-wave initial condition follows tanh(r cos/sin(3 theta - r)).
inline SpatioTemporalField simulate_lambda_omega(const LambdaOmegaConfig& cfg) {
    require(cfg.n >= 16, errc::invalid_argument, "simulate_lambda_omega: grid too small");
    require(cfg.dt > 0.0 && cfg.horizon > 0.0, errc::invalid_argument,
            "simulate_lambda_omega: nonpositive step/horizon");

    const std::size_t n = cfg.n;
    const std::size_t nn = n * n;
    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
    const std::size_t stride = std::max<std::size_t>(1, cfg.output_every);
    const std::size_t frames = steps / stride + 1;

    SpatioTemporalField f;
    f.nx = n;
    f.ny = n;
    f.nt = frames;
    f.lx = cfg.length;
    f.ly = cfg.length;
    f.x0 = -cfg.length / 2.0;
    f.y0 = -cfg.length / 2.0;
    f.species = {"u", "v"};
    f.values = {Vector(nn * frames, 0.0), Vector(nn * frames, 0.0)};
    f.t.resize(frames);

    Vector state(2 * nn, 0.0);
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double x = f.x(ix);
            const double y = f.y(iy);
            if (cfg.initial) {
                auto [u0, v0] = cfg.initial(x, y);
                state[iy * n + ix] = u0;
                state[nn + iy * n + ix] = v0;
            } else {
                const double r = std::sqrt(x * x + y * y);
                const double th = std::atan2(y, x);
                state[iy * n + ix] = std::tanh(r * std::cos(3.0 * th - r));
                state[nn + iy * n + ix] = std::tanh(r * std::sin(3.0 * th - r));
            }
        }

    SpectralLaplacian2d lap(n, n, cfg.length, cfg.length);
    Vector lap_u(nn, 0.0), lap_v(nn, 0.0);
    auto rhs = [&](double, const Vector& y, Vector& dy) {
        const double* u = y.data();
        const double* v = y.data() + nn;
        Vector us(u, u + nn), vs(v, v + nn);
        lap.apply(us, lap_u);
        lap.apply(vs, lap_v);
        for (std::size_t i = 0; i < nn; ++i) {
            const double rsq = u[i] * u[i] + v[i] * v[i];
            const double lam = 1.0 - rsq;
            const double omg = -cfg.beta * rsq;
            dy[i] = cfg.du * lap_u[i] + lam * u[i] - omg * v[i];
            dy[nn + i] = cfg.dv * lap_v[i] + omg * u[i] + lam * v[i];
        }
    };

    Rk4 stepper(2 * nn);
    std::size_t frame = 0;
    for (std::size_t step = 0; step <= steps; ++step) {
        if (step % stride == 0) {
            f.t[frame] = cfg.dt * static_cast<double>(step);
            for (std::size_t i = 0; i < nn; ++i) {
                f.values[0][frame * nn + i] = state[i];
                f.values[1][frame * nn + i] = state[nn + i];
            }
            ++frame;
        }
        if (step == steps) break;
        stepper.step(state, cfg.dt * static_cast<double>(step), cfg.dt, rhs);
        if (!all_finite(state))
            throw Error(errc::non_finite, "simulate_lambda_omega: state non-finite near t = " +
                                              std::to_string(cfg.dt * static_cast<double>(step + 1)));
    }
    return f;
}

}  // namespace groupsparse
