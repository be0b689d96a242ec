#include <gtest/gtest.h>

#include <cmath>

#include "groupsparse/simulate.hpp"

using namespace groupsparse;

namespace {

Vector linspace(double a, double b, std::size_t n) {
    Vector t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

double weighted_mass(const TimeSeriesSet& ts, std::size_t i) {
    return ts.get("x1")[i] + ts.get("x2")[i] + 2.0 * ts.get("x3")[i] + 2.0 * ts.get("x4")[i];
}

}  // namespace

TEST(EporSignal, ZeroAtOriginPeakAtTau) {
    auto t = linspace(0.0, 60.0, 601);
    auto c = synth_epor_signal(t, 0.7, 10.0);
    EXPECT_DOUBLE_EQ(c[0], 0.0);
    // Peak value equals the amplitude exactly at t = tau (grid point 100).
    EXPECT_NEAR(c[100], 0.7, 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE(c[i], 0.7 + 1e-12);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i], 0.0);
}

TEST(JakStat, ZeroRatesFreezeState) {
    JakStatConfig cfg;
    cfg.k1 = cfg.k2 = cfg.k3 = cfg.k4 = 0.0;
    cfg.n_points = 50;
    auto t = linspace(0.0, cfg.horizon, cfg.n_points);
    auto ts = simulate_jak_stat(cfg, synth_epor_signal(t, 1.0, 10.0));
    for (std::size_t i = 0; i < cfg.n_points; ++i) {
        EXPECT_DOUBLE_EQ(ts.get("x1")[i], 1.0);
        EXPECT_DOUBLE_EQ(ts.get("x2")[i], 0.0);
        EXPECT_DOUBLE_EQ(ts.get("x3")[i], 0.0);
        EXPECT_DOUBLE_EQ(ts.get("x4")[i], 0.0);
    }
}

TEST(JakStat, WeightedMassConserved) {
    JakStatConfig cfg;
    auto t = linspace(0.0, cfg.horizon, cfg.n_points);
    auto ts = simulate_jak_stat(cfg, synth_epor_signal(t, 1.0, 10.0));
    const double m0 = weighted_mass(ts, 0);
    for (std::size_t i = 0; i < cfg.n_points; ++i)
        EXPECT_NEAR(weighted_mass(ts, i), m0, 1e-8 * std::abs(m0));
}

TEST(JakStat, QualitativeDepletionAndNuclearRise) {
    JakStatConfig cfg;
    auto t = linspace(0.0, cfg.horizon, cfg.n_points);
    auto ts = simulate_jak_stat(cfg, synth_epor_signal(t, 1.0, 10.0));
    // x1 is depleted while the receptor signal is large...
    EXPECT_LT(ts.get("x1")[60], ts.get("x1")[0]);
    // ...and the nuclear species rises from zero and is eventually re-exported.
    double x4max = 0.0;
    for (double v : ts.get("x4")) x4max = std::max(x4max, v);
    EXPECT_GT(x4max, 10.0 * ts.get("x4")[0] + 1e-6);
    EXPECT_LT(ts.get("x4").back(), x4max);
}

TEST(AdvectionDiffusion, NoVelocityNoDiffusionIsConstantInTime) {
    AdvectionDiffusionConfig cfg;
    cfg.nx = 64;
    cfg.nt = 20;
    cfg.du = cfg.dv = 0.0;
    cfg.c_offset = 0.0;
    cfg.c_amp = 0.0;
    cfg.dt_max = 1e-3;
    auto f = simulate_advection_diffusion(cfg);
    for (std::size_t it = 0; it < cfg.nt; ++it)
        for (std::size_t ix = 0; ix < cfg.nx; ++ix) {
            EXPECT_NEAR(f.at(0, ix, 0, it), f.at(0, ix, 0, 0), 1e-10);
            EXPECT_NEAR(f.at(1, ix, 0, it), f.at(1, ix, 0, 0), 1e-10);
        }
}

TEST(AdvectionDiffusion, MassConserved) {
    AdvectionDiffusionConfig cfg;
    cfg.nx = 128;
    cfg.nt = 50;
    auto f = simulate_advection_diffusion(cfg);
    for (std::size_t sp = 0; sp < 2; ++sp) {
        double m0 = 0.0;
        for (std::size_t ix = 0; ix < cfg.nx; ++ix) m0 += f.at(sp, ix, 0, 0);
        // Initial cosine integrates to ~0; compare against the max amplitude.
        for (std::size_t it = 0; it < cfg.nt; ++it) {
            double m = 0.0;
            for (std::size_t ix = 0; ix < cfg.nx; ++ix) m += f.at(sp, ix, 0, it);
            EXPECT_NEAR(m, m0, 1e-8 * static_cast<double>(cfg.nx));
        }
    }
}

TEST(AdvectionDiffusion, FasterDiffusingSpeciesSmoothsMore) {
    AdvectionDiffusionConfig cfg;
    cfg.nx = 128;
    cfg.nt = 30;
    auto f = simulate_advection_diffusion(cfg);
    auto amplitude = [&](std::size_t sp, std::size_t it) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t ix = 0; ix < cfg.nx; ++ix) {
            lo = std::min(lo, f.at(sp, ix, 0, it));
            hi = std::max(hi, f.at(sp, ix, 0, it));
        }
        return hi - lo;
    };
    EXPECT_LT(amplitude(1, cfg.nt - 1), amplitude(0, cfg.nt - 1));
    EXPECT_LT(amplitude(0, cfg.nt - 1), amplitude(0, 0) + 1e-12);
}

TEST(LambdaOmega, ZeroStateIsFixedPoint) {
    LambdaOmegaConfig cfg;
    cfg.n = 32;
    cfg.horizon = 1.0;
    cfg.initial = [](double, double) { return std::pair<double, double>{0.0, 0.0}; };
    auto f = simulate_lambda_omega(cfg);
    for (std::size_t s = 0; s < 2; ++s)
        for (double v : f.values[s]) EXPECT_EQ(v, 0.0);
}

TEST(LambdaOmega, UniformUnitCircleStateRotatesAtBeta) {
    // Spatially uniform (u, v) = (1, 0): the Laplacian vanishes, r stays on
    // the unit circle, and the state rotates there at angular rate beta
    // (u' = beta v, v' = -beta u once lambda(1) = 0).
    LambdaOmegaConfig cfg;
    cfg.n = 32;
    cfg.beta = 1.0;
    cfg.dt = 0.01;
    cfg.horizon = 2.0;
    cfg.initial = [](double, double) { return std::pair<double, double>{1.0, 0.0}; };
    auto f = simulate_lambda_omega(cfg);
    const std::size_t last = f.nt - 1;
    for (std::size_t it = 0; it < f.nt; ++it) {
        const double u = f.at(0, 3, 5, it);
        const double v = f.at(1, 3, 5, it);
        EXPECT_NEAR(std::sqrt(u * u + v * v), 1.0, 1e-8);
    }
    const double phase = std::atan2(f.at(1, 0, 0, last), f.at(0, 0, 0, last));
    EXPECT_NEAR(phase, -cfg.beta * cfg.horizon, 1e-6);
    // Field stayed spatially uniform.
    EXPECT_NEAR(f.at(0, cfg.n / 2, cfg.n / 2, last), f.at(0, 0, 0, last), 1e-10);
}

TEST(LambdaOmega, SpiralFormsAndStaysBounded) {
    LambdaOmegaConfig cfg;
    cfg.n = 64;
    cfg.horizon = 7.5;
    auto f = simulate_lambda_omega(cfg);
    // Snapshot at t = 7.5 exists and is bounded by the reaction kinetics.
    EXPECT_NEAR(f.t.back(), 7.5, 1e-12);
    double umin = 1e300, umax = -1e300;
    const std::size_t last = f.nt - 1;
    for (std::size_t iy = 0; iy < f.ny; ++iy)
        for (std::size_t ix = 0; ix < f.nx; ++ix) {
            umin = std::min(umin, f.at(0, ix, iy, last));
            umax = std::max(umax, f.at(0, ix, iy, last));
        }
    EXPECT_LT(umax, 1.5);
    EXPECT_GT(umin, -1.5);
    // A genuine pattern remains (not decayed to a constant).
    EXPECT_GT(umax - umin, 0.5);
}

TEST(SpectralDerivative, ConstantFieldIsZero) {
    Vector u(64, 2.5);
    auto d = spectral_derivative(u, 3.0, 1);
    for (double v : d) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(SpectralDerivative, ResolvedSineIsAnalytic) {
    const std::size_t n = 128;
    const double l = 5.0;
    const double k = 2.0 * M_PI / l;
    Vector u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = std::sin(k * l * static_cast<double>(i) / static_cast<double>(n));
    auto d1 = spectral_derivative(u, l, 1);
    auto d2 = spectral_derivative(u, l, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = l * static_cast<double>(i) / static_cast<double>(n);
        EXPECT_NEAR(d1[i], k * std::cos(k * x), 1e-10);
        EXPECT_NEAR(d2[i], -k * k * std::sin(k * x), 1e-8);
    }
}

TEST(SpectralDerivative, NonPowerOfTwoFallback) {
    const std::size_t n = 96;  // 96 = 2^5 * 3, exercises the direct DFT path
    Fft fft(n);
    EXPECT_FALSE(fft.fast());
    const double l = 2.0;
    const double k = 2.0 * M_PI / l;
    Vector u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = std::cos(k * l * static_cast<double>(i) / static_cast<double>(n));
    auto d1 = spectral_derivative(u, l, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = l * static_cast<double>(i) / static_cast<double>(n);
        EXPECT_NEAR(d1[i], -k * std::sin(k * x), 1e-9);
    }
}

TEST(Rk4Step, ZeroRhsKeepsState) {
    Vector y = {1.0, -2.0};
    auto out = rk4_step(y, 0.0, 0.1, [](double, const Vector&, Vector& dy) {
        dy[0] = 0.0;
        dy[1] = 0.0;
    });
    EXPECT_EQ(out, y);
}

TEST(Rk4Step, ExponentialGrowthSingleStep) {
    // One RK4 step of y' = y from 1 with dt = 0.1: the degree-4 Taylor sum
    // 1 + h + h^2/2 + h^3/6 + h^4/24 = 1.10517083...
    Vector y = {1.0};
    auto out = rk4_step(y, 0.0, 0.1, [](double, const Vector& s, Vector& dy) { dy[0] = s[0]; });
    const double expected = 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0 + 0.0001 / 24.0;
    EXPECT_NEAR(out[0], expected, 1e-15);
    EXPECT_NEAR(out[0], 1.1051708, 1e-6);
}

TEST(Rk4Step, DecayMatchesAnalyticSolution) {
    Vector y = {1.0};
    const double dt = 1e-3;
    for (int i = 0; i < 1000; ++i)
        y = rk4_step(y, dt * i, dt, [](double, const Vector& s, Vector& dy) { dy[0] = -s[0]; });
    EXPECT_NEAR(y[0], std::exp(-1.0), 1e-9);
}

TEST(Rk4Step, FourthOrderConvergence) {
    auto terminal_error = [](std::size_t steps) {
        Vector y = {1.0};
        const double dt = 1.0 / static_cast<double>(steps);
        for (std::size_t i = 0; i < steps; ++i)
            y = rk4_step(y, dt * static_cast<double>(i), dt,
                         [](double, const Vector& s, Vector& dy) { dy[0] = -s[0]; });
        return std::abs(y[0] - std::exp(-1.0));
    };
    const double e1 = terminal_error(20);
    const double e2 = terminal_error(40);
    EXPECT_NEAR(e1 / e2, 16.0, 2.0);
}
