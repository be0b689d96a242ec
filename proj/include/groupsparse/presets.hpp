#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "groupsparse/preprocess.hpp"
#include "groupsparse/problem.hpp"
#include "groupsparse/simulate.hpp"

namespace groupsparse {

enum class PriorMode { none, conservation, spatial, spatial_equivalence, symmetry };

inline const char* to_string(PriorMode m) {
    switch (m) {
        case PriorMode::none: return "none";
        case PriorMode::conservation: return "conservation";
        case PriorMode::spatial: return "spatial";
        case PriorMode::spatial_equivalence: return "spatial+equivalence";
        case PriorMode::symmetry: return "symmetry";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Signalling-cascade experiment (four species + measured receptor input)
// ---------------------------------------------------------------------------

struct JakStatExperiment {
    JakStatConfig sim;
    double epor_amplitude = 1.0;
    double epor_tau = 10.0;
    double sigma = 0.1;
    DerivativeSpec time_diff{11, 4};
    bool exact_derivatives = false;
    PriorMode prior = PriorMode::conservation;
};

/// The 19-term candidate roster: the four species, all pairwise products
/// (including squares), the four receptor-driven terms, and one cubic
/// confounder. Contains every true model term.
inline std::vector<TermLabel> jak_stat_roster() {
    std::vector<TermLabel> roster;
    const std::vector<std::string> vars = {"x1", "x2", "x3", "x4"};
    for (const auto& v : vars) roster.push_back(TermLabel::variable(v));
    for (std::size_t a = 0; a < vars.size(); ++a)
        for (std::size_t b = a; b < vars.size(); ++b)
            roster.push_back(TermLabel::variable(vars[a]) * TermLabel::variable(vars[b]));
    for (const auto& v : vars) {
        TermLabel l = TermLabel::variable(v);
        l.exogenous = "c";
        roster.push_back(l);
    }
    roster.push_back(TermLabel::variable("x2", 3));
    std::sort(roster.begin(), roster.end(), grlex_less);
    return roster;
}

inline TimeSeriesSet jak_stat_clean(const JakStatExperiment& ex) {
    Vector t(ex.sim.n_points);
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = ex.sim.horizon * static_cast<double>(i) / static_cast<double>(ex.sim.n_points - 1);
    return simulate_jak_stat(ex.sim, synth_epor_signal(t, ex.epor_amplitude, ex.epor_tau));
}

inline RegressionProblem jak_stat_problem(const JakStatExperiment& ex,
                                          const TimeSeriesSet& clean,
                                          std::uint64_t noise_seed) {
    const auto noisy = add_noise(clean, {ex.sigma, noise_seed});
    const std::size_t n = clean.t.size();
    const std::size_t h = ex.time_diff.window / 2;
    require(n > 2 * h, errc::invalid_argument, "jak_stat_problem: series too short");
    const double dt = clean.t[1] - clean.t[0];

    std::vector<std::size_t> keep;
    for (std::size_t i = h; i + h < n; ++i) keep.push_back(i);

    ValueTable table;
    for (const char* name : {"x1", "x2", "x3", "x4", "c"}) {
        const Vector& full = noisy.get(name);
        Vector at(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) at[i] = full[keep[i]];
        table[{name, {}}] = std::move(at);
    }

    auto roster = jak_stat_roster();
    auto base = build_dictionary(roster, table, keep.size());

    const std::vector<std::string> eq = {"x1", "x2", "x3", "x4"};
    std::vector<Dictionary> blocks;
    std::vector<Vector> targets;
    for (std::size_t e = 0; e < 4; ++e) {
        Dictionary blk = base;
        blk.blocks.front().name = eq[e];
        Vector target(keep.size(), 0.0);
        if (ex.exact_derivatives) {
            const Vector& x1 = clean.get("x1");
            const Vector& x2 = clean.get("x2");
            const Vector& x3 = clean.get("x3");
            const Vector& x4 = clean.get("x4");
            const Vector& c = clean.get("c");
            for (std::size_t i = 0; i < keep.size(); ++i) {
                const std::size_t j = keep[i];
                const double x2sq = x2[j] * x2[j];
                switch (e) {
                    case 0: target[i] = -ex.sim.k1 * x1[j] * c[j] + 2.0 * ex.sim.k4 * x4[j]; break;
                    case 1: target[i] = ex.sim.k1 * x1[j] * c[j] - ex.sim.k2 * x2sq; break;
                    case 2: target[i] = -ex.sim.k3 * x3[j] + 0.5 * ex.sim.k2 * x2sq; break;
                    case 3: target[i] = ex.sim.k3 * x3[j] - ex.sim.k4 * x4[j]; break;
                }
            }
        } else {
            Vector deriv = polyfit_derivative(noisy.get(eq[e]), dt, ex.time_diff, 1);
            for (std::size_t i = 0; i < keep.size(); ++i) target[i] = deriv[keep[i]];
        }
        blocks.push_back(std::move(blk));
        targets.push_back(std::move(target));
    }

    RegressionProblem p;
    auto stacked = stack_blocks(blocks, targets, true);
    p.dict = std::move(stacked.first);
    p.target = std::move(stacked.second);

    if (ex.prior == PriorMode::conservation) {
        TermLabel x1c = TermLabel::variable("x1");
        x1c.exogenous = "c";
        std::vector<ConservationPair> pairs = {
            {"g1", x1c, "x1", "x2"},
            {"g2", TermLabel::variable("x2", 2), "x2", "x3"},
            {"g3", TermLabel::variable("x3"), "x3", "x4"},
            {"g4", TermLabel::variable("x4"), "x1", "x4"},
        };
        p.groups = conservation_groups(p.dict, pairs);
    } else {
        p.groups = GroupStructure::singletons(p.dict);
    }
    p.metadata = {{"experiment", "jak-stat"},
                  {"sigma", ex.sigma},
                  {"noise_seed", noise_seed},
                  {"n_points", ex.sim.n_points},
                  {"prior", to_string(ex.prior)},
                  {"time_diff", {{"window", ex.time_diff.window}, {"degree", ex.time_diff.degree}}},
                  {"exact_derivatives", ex.exact_derivatives}};
    return p;
}

inline std::vector<std::string> jak_stat_truth(const JakStatExperiment& ex) {
    if (ex.prior == PriorMode::conservation) return {"g1", "g2", "g3", "g4"};
    return {"x1:x1*c", "x1:x4", "x2:x1*c", "x2:x2^2",
            "x3:x2^2", "x3:x3", "x4:x3", "x4:x4"};
}

inline std::vector<TruthTerm> jak_stat_truth_terms(const JakStatExperiment& ex) {
    TermLabel x1c = TermLabel::variable("x1");
    x1c.exogenous = "c";
    const TermLabel x2sq = TermLabel::variable("x2", 2);
    return {
        {"x1", x1c, -ex.sim.k1},
        {"x1", TermLabel::variable("x4"), 2.0 * ex.sim.k4},
        {"x2", x1c, ex.sim.k1},
        {"x2", x2sq, -ex.sim.k2},
        {"x3", x2sq, 0.5 * ex.sim.k2},
        {"x3", TermLabel::variable("x3"), -ex.sim.k3},
        {"x4", TermLabel::variable("x3"), ex.sim.k3},
        {"x4", TermLabel::variable("x4"), -ex.sim.k4},
    };
}

/// Rate-constant readout: each occurrence of a rate in the model maps to one
/// estimated coefficient times a sign/stoichiometry factor.
struct RateReadout {
    std::string rate;   // e.g. "k1-"
    std::string block;
    TermLabel label;
    double multiplier;  // estimate = multiplier * coefficient
    double truth;
};

inline std::vector<RateReadout> jak_stat_rate_readouts(const JakStatExperiment& ex) {
    TermLabel x1c = TermLabel::variable("x1");
    x1c.exogenous = "c";
    const TermLabel x2sq = TermLabel::variable("x2", 2);
    return {
        {"k1-", "x1", x1c, -1.0, ex.sim.k1},
        {"k1+", "x2", x1c, 1.0, ex.sim.k1},
        {"k2-", "x2", x2sq, -1.0, ex.sim.k2},
        {"k2+", "x3", x2sq, 2.0, ex.sim.k2},
        {"k3-", "x3", TermLabel::variable("x3"), -1.0, ex.sim.k3},
        {"k3+", "x4", TermLabel::variable("x3"), 1.0, ex.sim.k3},
        {"k4-", "x4", TermLabel::variable("x4"), -1.0, ex.sim.k4},
        {"k4+", "x1", TermLabel::variable("x4"), 0.5, ex.sim.k4},
    };
}

// ---------------------------------------------------------------------------
// Advection-diffusion experiment (latent spatially varying velocity)
// ---------------------------------------------------------------------------

struct AdvectionDiffusionExperiment {
    AdvectionDiffusionConfig sim;
    double sigma = 0.15;
    std::size_t n_locations = 10;  // blocks per species
    std::size_t n_times = 75;      // rows per block
    DerivativeSpec time_diff{11, 4};
    DerivativeSpec space_diff{9, 4};
    bool exact_derivatives = false;
    PriorMode prior = PriorMode::spatial_equivalence;
};

/// 15 candidate operators per location block: polynomial factors up to u^3
/// times derivative factors up to u_xx.
inline std::vector<TermLabel> advection_roster(const std::string& var) {
    const TermLabel u = TermLabel::variable(var);
    const TermLabel ux = TermLabel::derivative(var, {1});
    const TermLabel uxx = TermLabel::derivative(var, {2});
    std::vector<TermLabel> roster = {u,       u * u,    u * u * u, ux,       uxx,
                                     u * ux,  u * u * ux, u * u * u * ux,
                                     u * uxx, u * u * uxx, u * u * u * uxx,
                                     ux * ux, ux * uxx, uxx * uxx, u * ux * uxx};
    std::sort(roster.begin(), roster.end(), grlex_less);
    return roster;
}

inline SpatioTemporalField advection_diffusion_clean(const AdvectionDiffusionExperiment& ex) {
    return simulate_advection_diffusion(ex.sim);
}

inline RegressionProblem advection_diffusion_problem(const AdvectionDiffusionExperiment& ex,
                                                     const SpatioTemporalField& clean,
                                                     std::uint64_t noise_seed,
                                                     std::vector<std::size_t> fixed_locations = {}) {
    const auto noisy = add_noise(clean, {ex.sigma, noise_seed});
    const std::size_t hx = ex.space_diff.window / 2;
    const std::size_t ht = ex.time_diff.window / 2;
    const double dx = clean.dx();
    const double dt = clean.t[1] - clean.t[0];

    const auto locations =
        fixed_locations.empty()
            ? sample_interior(clean.nx, hx, ex.n_locations, derive_seed(noise_seed, 0xad10))
            : std::move(fixed_locations);
    require(locations.size() == ex.n_locations, errc::invalid_argument,
            "advection_diffusion_problem: wrong number of locations");
    const auto times = sample_interior(clean.nt, ht, ex.n_times, derive_seed(noise_seed, 0xad20));

    PolyfitFilter ddx1(ex.space_diff, 1, dx), ddx2(ex.space_diff, 2, dx);
    PolyfitFilter ddt(ex.time_diff, 1, dt);

    const std::vector<std::string> species = {"u", "v"};
    const double diffusion[2] = {ex.sim.du, ex.sim.dv};
    const Vector c = advection_velocity(ex.sim);
    Vector cx(clean.nx, 0.0);
    if (ex.exact_derivatives) cx = spectral_derivative(c, ex.sim.length, 1);

    std::vector<Dictionary> blocks;
    std::vector<Vector> targets;
    std::vector<std::vector<TermLabel>> rosters;
    for (std::size_t sp = 0; sp < 2; ++sp) rosters.push_back(advection_roster(species[sp]));

    for (std::size_t sp = 0; sp < 2; ++sp) {
        const Vector& field = ex.exact_derivatives ? clean.values[sp] : noisy.values[sp];
        // Exact mode: spectral derivative slices of the clean field, one per
        // sampled time.
        std::vector<Vector> ux_slice(clean.nt), uxx_slice(clean.nt);
        if (ex.exact_derivatives) {
            for (std::size_t ti : times) {
                Vector slice(clean.nx);
                for (std::size_t ix = 0; ix < clean.nx; ++ix)
                    slice[ix] = clean.at(sp, ix, 0, ti);
                ux_slice[ti] = spectral_derivative(slice, clean.lx, 1);
                uxx_slice[ti] = spectral_derivative(slice, clean.lx, 2);
            }
        }
        for (std::size_t loc : locations) {
            ValueTable table;
            Vector uval(times.size()), ux(times.size()), uxx(times.size()), ut(times.size());
            for (std::size_t r = 0; r < times.size(); ++r) {
                const std::size_t ti = times[r];
                uval[r] = field[clean.index(loc, 0, ti)];
                if (ex.exact_derivatives) {
                    ux[r] = ux_slice[ti][loc];
                    uxx[r] = uxx_slice[ti][loc];
                    ut[r] = -(c[loc] * ux[r] + cx[loc] * uval[r]) + diffusion[sp] * uxx[r];
                } else {
                    const double* row = field.data() + clean.index(0, 0, ti);
                    ux[r] = ddx1.eval(row, clean.nx, loc);
                    uxx[r] = ddx2.eval(row, clean.nx, loc);
                    ut[r] = ddt.eval_strided(field.data() + loc, clean.nx, clean.nt, ti);
                }
            }
            table[{species[sp], {}}] = std::move(uval);
            table[{species[sp], {1}}] = std::move(ux);
            table[{species[sp], {2}}] = std::move(uxx);
            Dictionary blk = build_dictionary(rosters[sp], table, times.size(),
                                              species[sp] + "@" + std::to_string(loc));
            blocks.push_back(std::move(blk));
            targets.push_back(std::move(ut));
        }
    }

    RegressionProblem p;
    auto stacked = stack_blocks(blocks, targets, true);
    p.dict = std::move(stacked.first);
    p.target = std::move(stacked.second);

    const std::size_t width = rosters[0].size();
    std::vector<std::string> names_u, names_v;
    for (const auto& l : rosters[0]) names_u.push_back(l.str());
    for (const auto& l : rosters[1]) names_v.push_back(l.str());
    if (ex.prior == PriorMode::spatial_equivalence) {
        std::vector<std::pair<std::string, std::string>> pairing;
        for (std::size_t l = 0; l < width; ++l) pairing.push_back({names_u[l], names_v[l]});
        p.groups = union_groups(spatial_groups(width, ex.n_locations, names_u),
                                spatial_groups(width, ex.n_locations, names_v), pairing);
    } else if (ex.prior == PriorMode::spatial) {
        p.groups = union_groups(spatial_groups(width, ex.n_locations, names_u),
                                spatial_groups(width, ex.n_locations, names_v), {});
    } else {
        p.groups = GroupStructure::singletons(p.dict);
    }

    nlohmann::json locs = nlohmann::json::array();
    for (std::size_t l : locations) locs.push_back(l);
    p.metadata = {{"experiment", "advection-diffusion"},
                  {"sigma", ex.sigma},
                  {"noise_seed", noise_seed},
                  {"locations", locs},
                  {"n_times", ex.n_times},
                  {"prior", to_string(ex.prior)},
                  {"exact_derivatives", ex.exact_derivatives}};
    return p;
}

inline std::vector<std::string> advection_diffusion_truth(const AdvectionDiffusionExperiment& ex) {
    switch (ex.prior) {
        case PriorMode::spatial_equivalence: return {"u", "u_x", "u_xx"};
        case PriorMode::spatial: return {"u", "u_x", "u_xx", "v", "v_x", "v_xx"};
        default: {
            std::vector<std::string> names;
            // Without any grouping, truth is every per-location column of the
            // three true operators for both species.
            return names;  // exact recovery is not scored without priors
        }
    }
}

// ---------------------------------------------------------------------------
// Reaction-diffusion experiment (species-swap symmetry)
// ---------------------------------------------------------------------------

struct LambdaOmegaExperiment {
    LambdaOmegaConfig sim;
    double sigma = 0.1;
    std::size_t n_samples = 2000;  // space-time samples per species equation
    DerivativeSpec time_diff{11, 4};
    DerivativeSpec space_diff{9, 4};
    bool exact_derivatives = false;
    PriorMode prior = PriorMode::symmetry;
};

/// 18 candidate terms per species equation: a constant, the nine monomials
/// in (u, v) up to total degree 3, and the eight pure derivative terms of
/// both species up to second order.
inline std::vector<TermLabel> reaction_diffusion_roster() {
    std::vector<TermLabel> roster;
    roster.push_back(TermLabel::constant());
    for (int du = 0; du <= 3; ++du)
        for (int dv = 0; du + dv <= 3; ++dv) {
            if (du + dv == 0) continue;
            TermLabel l;
            if (du > 0) l = l * TermLabel::variable("u", du);
            if (dv > 0) l = l * TermLabel::variable("v", dv);
            roster.push_back(l);
        }
    for (const char* var : {"u", "v"}) {
        roster.push_back(TermLabel::derivative(var, {1, 0}));
        roster.push_back(TermLabel::derivative(var, {0, 1}));
        roster.push_back(TermLabel::derivative(var, {2, 0}));
        roster.push_back(TermLabel::derivative(var, {0, 2}));
    }
    std::sort(roster.begin(), roster.end(), grlex_less);
    return roster;
}

inline SpatioTemporalField lambda_omega_clean(const LambdaOmegaExperiment& ex) {
    return simulate_lambda_omega(ex.sim);
}

struct SamplePoint {
    std::size_t ix, iy, it;
};

inline std::vector<SamplePoint> lambda_omega_samples(const SpatioTemporalField& f,
                                                     const LambdaOmegaExperiment& ex,
                                                     std::uint64_t seed) {
    const std::size_t hx = ex.space_diff.window / 2;
    const std::size_t ht = ex.time_diff.window / 2;
    require(f.nx > 2 * hx && f.ny > 2 * hx && f.nt > 2 * ht, errc::invalid_argument,
            "lambda_omega_samples: field too small for stencils");
    const std::size_t ex_nx = f.nx - 2 * hx;
    const std::size_t ex_ny = f.ny - 2 * hx;
    const std::size_t ex_nt = f.nt - 2 * ht;
    const std::size_t interior = ex_nx * ex_ny * ex_nt;
    require(ex.n_samples <= interior, errc::invalid_argument,
            "lambda_omega_samples: more samples than interior points");
    Rng rng(seed);
    std::set<std::size_t> chosen;
    while (chosen.size() < ex.n_samples)
        chosen.insert(static_cast<std::size_t>(rng.next_below(interior)));
    std::vector<SamplePoint> pts;
    for (std::size_t flat : chosen) {
        SamplePoint p;
        p.ix = hx + flat % ex_nx;
        p.iy = hx + (flat / ex_nx) % ex_ny;
        p.it = ht + flat / (ex_nx * ex_ny);
        pts.push_back(p);
    }
    return pts;
}

inline RegressionProblem lambda_omega_problem(const LambdaOmegaExperiment& ex,
                                              const SpatioTemporalField& clean,
                                              std::uint64_t noise_seed) {
    const auto noisy = add_noise(clean, {ex.sigma, noise_seed});
    const auto samples = lambda_omega_samples(clean, ex, derive_seed(noise_seed, 0x10a3));
    const std::size_t ns = samples.size();
    const double dx = clean.dx();
    const double dy = clean.dy();
    const double dt = clean.t[1] - clean.t[0];

    PolyfitFilter ddx1(ex.space_diff, 1, dx), ddx2(ex.space_diff, 2, dx);
    PolyfitFilter ddy1(ex.space_diff, 1, dy), ddy2(ex.space_diff, 2, dy);
    PolyfitFilter ddt(ex.time_diff, 1, dt);

    // Shared value table: both species equations see identical columns.
    ValueTable table;
    Vector ut(ns, 0.0), vt(ns, 0.0);
    const std::size_t nn = clean.nx * clean.ny;

    if (ex.exact_derivatives) {
        std::set<std::size_t> slice_times;
        for (const auto& s : samples) slice_times.insert(s.it);
        std::map<std::size_t, std::vector<Vector>> dslices;  // it -> 8 derivative slices
        for (std::size_t ti : slice_times) {
            std::vector<Vector> d;
            for (std::size_t sp = 0; sp < 2; ++sp) {
                Vector slice(clean.values[sp].begin() + static_cast<long>(ti * nn),
                             clean.values[sp].begin() + static_cast<long>((ti + 1) * nn));
                d.push_back(spectral_derivative_2d(slice, clean.nx, clean.ny, clean.lx, clean.ly, 0, 1));
                d.push_back(spectral_derivative_2d(slice, clean.nx, clean.ny, clean.lx, clean.ly, 1, 1));
                d.push_back(spectral_derivative_2d(slice, clean.nx, clean.ny, clean.lx, clean.ly, 0, 2));
                d.push_back(spectral_derivative_2d(slice, clean.nx, clean.ny, clean.lx, clean.ly, 1, 2));
            }
            dslices[ti] = std::move(d);
        }
        Vector uval(ns), vval(ns);
        Vector dsets[8];
        for (auto& v : dsets) v.assign(ns, 0.0);
        for (std::size_t r = 0; r < ns; ++r) {
            const auto& s = samples[r];
            const std::size_t flat = s.iy * clean.nx + s.ix;
            uval[r] = clean.at(0, s.ix, s.iy, s.it);
            vval[r] = clean.at(1, s.ix, s.iy, s.it);
            const auto& d = dslices[s.it];
            for (std::size_t q = 0; q < 8; ++q) dsets[q][r] = d[q][flat];
            const double rsq = uval[r] * uval[r] + vval[r] * vval[r];
            const double lam = 1.0 - rsq;
            const double omg = -ex.sim.beta * rsq;
            ut[r] = ex.sim.du * (dsets[2][r] + dsets[3][r]) + lam * uval[r] - omg * vval[r];
            vt[r] = ex.sim.dv * (dsets[6][r] + dsets[7][r]) + omg * uval[r] + lam * vval[r];
        }
        table[{"u", {}}] = std::move(uval);
        table[{"v", {}}] = std::move(vval);
        table[{"u", {1, 0}}] = std::move(dsets[0]);
        table[{"u", {0, 1}}] = std::move(dsets[1]);
        table[{"u", {2, 0}}] = std::move(dsets[2]);
        table[{"u", {0, 2}}] = std::move(dsets[3]);
        table[{"v", {1, 0}}] = std::move(dsets[4]);
        table[{"v", {0, 1}}] = std::move(dsets[5]);
        table[{"v", {2, 0}}] = std::move(dsets[6]);
        table[{"v", {0, 2}}] = std::move(dsets[7]);
    } else {
        Vector uval(ns), vval(ns);
        Vector d[2][4];
        for (auto& row : d)
            for (auto& v : row) v.assign(ns, 0.0);
        for (std::size_t r = 0; r < ns; ++r) {
            const auto& s = samples[r];
            for (std::size_t sp = 0; sp < 2; ++sp) {
                const Vector& field = noisy.values[sp];
                const double* xline = field.data() + clean.index(0, s.iy, s.it);
                const double* ybase = field.data() + clean.index(s.ix, 0, s.it);
                const double* tbase = field.data() + clean.index(s.ix, s.iy, 0);
                d[sp][0][r] = ddx1.eval(xline, clean.nx, s.ix);
                d[sp][1][r] = ddy1.eval_strided(ybase, clean.nx, clean.ny, s.iy);
                d[sp][2][r] = ddx2.eval(xline, clean.nx, s.ix);
                d[sp][3][r] = ddy2.eval_strided(ybase, clean.nx, clean.ny, s.iy);
                const double dtv = ddt.eval_strided(tbase, nn, clean.nt, s.it);
                if (sp == 0)
                    ut[r] = dtv;
                else
                    vt[r] = dtv;
            }
            uval[r] = noisy.at(0, s.ix, s.iy, s.it);
            vval[r] = noisy.at(1, s.ix, s.iy, s.it);
        }
        table[{"u", {}}] = std::move(uval);
        table[{"v", {}}] = std::move(vval);
        table[{"u", {1, 0}}] = std::move(d[0][0]);
        table[{"u", {0, 1}}] = std::move(d[0][1]);
        table[{"u", {2, 0}}] = std::move(d[0][2]);
        table[{"u", {0, 2}}] = std::move(d[0][3]);
        table[{"v", {1, 0}}] = std::move(d[1][0]);
        table[{"v", {0, 1}}] = std::move(d[1][1]);
        table[{"v", {2, 0}}] = std::move(d[1][2]);
        table[{"v", {0, 2}}] = std::move(d[1][3]);
    }

    auto roster = reaction_diffusion_roster();
    Dictionary du_blk = build_dictionary(roster, table, ns, "u");
    Dictionary dv_blk = build_dictionary(roster, table, ns, "v");

    GroupStructure groups;
    if (ex.prior == PriorMode::symmetry)
        groups = symmetry_groups(du_blk, dv_blk, "u", "v");

    RegressionProblem p;
    auto stacked = stack_blocks({du_blk, dv_blk}, {ut, vt}, true);
    p.dict = std::move(stacked.first);
    p.target = std::move(stacked.second);
    p.groups = ex.prior == PriorMode::symmetry ? std::move(groups)
                                               : GroupStructure::singletons(p.dict);
    p.metadata = {{"experiment", "lambda-omega"},
                  {"sigma", ex.sigma},
                  {"noise_seed", noise_seed},
                  {"n_samples", ex.n_samples},
                  {"prior", to_string(ex.prior)},
                  {"exact_derivatives", ex.exact_derivatives}};
    return p;
}

inline std::vector<std::string> lambda_omega_truth(const LambdaOmegaExperiment& ex) {
    if (ex.prior == PriorMode::symmetry)
        return {"u", "u^3", "u^2*v", "u*v^2", "v^3", "u_xx", "u_yy"};
    return {"u:u", "u:u^3", "u:u^2*v", "u:u*v^2", "u:v^3", "u:u_xx", "u:u_yy",
            "v:v", "v:v^3", "v:u^2*v", "v:u*v^2", "v:u^3", "v:v_xx", "v:v_yy"};
}

inline std::vector<TruthTerm> lambda_omega_truth_terms(const LambdaOmegaExperiment& ex) {
    const auto u = TermLabel::variable("u");
    const auto v = TermLabel::variable("v");
    return {
        {"u", u, 1.0},
        {"u", u * u * u, -1.0},
        {"u", u * v * v, -1.0},
        {"u", u * u * v, ex.sim.beta},
        {"u", v * v * v, ex.sim.beta},
        {"u", TermLabel::derivative("u", {2, 0}), ex.sim.du},
        {"u", TermLabel::derivative("u", {0, 2}), ex.sim.du},
        {"v", v, 1.0},
        {"v", v * v * v, -1.0},
        {"v", u * u * v, -1.0},
        {"v", u * u * u, -ex.sim.beta},
        {"v", u * v * v, -ex.sim.beta},
        {"v", TermLabel::derivative("v", {2, 0}), ex.sim.dv},
        {"v", TermLabel::derivative("v", {0, 2}), ex.sim.dv},
    };
}

/// Group size k used in the false-positive bound, per prior.
inline std::size_t prior_bound_group_size(PriorMode prior, std::size_t n_locations = 10) {
    switch (prior) {
        case PriorMode::conservation: return 2;
        case PriorMode::symmetry: return 2;
        case PriorMode::spatial: return n_locations;
        case PriorMode::spatial_equivalence: return 2 * n_locations;
        case PriorMode::none: return 1;
    }
    return 1;
}

}  // namespace groupsparse
