#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "groupsparse/io.hpp"
#include "groupsparse/presets.hpp"
#include "groupsparse/stability.hpp"

namespace groupsparse {

/// Fully-resolved run configuration. Figure presets fill one of these; a
/// JSON config file or command-line flags override individual fields.
struct ExperimentConfig {
    std::string experiment = "jak-stat";  // jak-stat | advection-diffusion | lambda-omega
    PriorMode prior = PriorMode::conservation;
    double sigma = 0.1;
    std::uint64_t seed = 1234;
    std::size_t trials = 20;
    std::size_t threads = 1;
    std::string out_dir = "out";
    bool exact_derivatives = false;

    // sampling
    std::size_t n_points = 200;     // time-series length (signalling cascade)
    std::size_t n_locations = 10;   // spatial blocks per species (advection-diffusion)
    std::size_t n_times = 75;       // rows per location block
    std::size_t n_samples = 2000;   // space-time samples per equation (reaction-diffusion)

    DerivativeSpec time_diff{11, 4};
    DerivativeSpec space_diff{9, 4};

    StabilityOptions stability;     // B, fraction, n_lambda
    double pi_th = 0.8;
    double e_fp = 1.0;

    double fit_lambda = -1.0;       // absolute penalty for `fit`; < 0 means use relative
    double fit_lambda_rel = 0.3;    // fraction of lambda_max

    std::string sweep_variable;     // "n_points" | "sigma" (achievability)
    Vector sweep_values;

    std::string groups_file;        // optional external group-structure JSON

    nlohmann::json to_json() const {
        return {{"experiment", experiment},
                {"prior", to_string(prior)},
                {"sigma", sigma},
                {"seed", seed},
                {"trials", trials},
                {"threads", threads},
                {"out", out_dir},
                {"exact_derivatives", exact_derivatives},
                {"sampling",
                 {{"n_points", n_points},
                  {"n_locations", n_locations},
                  {"n_times", n_times},
                  {"n_samples", n_samples}}},
                {"differentiation",
                 {{"time_window", time_diff.window},
                  {"time_degree", time_diff.degree},
                  {"space_window", space_diff.window},
                  {"space_degree", space_diff.degree}}},
                {"stability",
                 {{"subsamples", stability.subsamples},
                  {"fraction", stability.fraction},
                  {"n_lambda", stability.n_lambda},
                  {"pi_threshold", pi_th},
                  {"expected_fp", e_fp}}},
                {"fit", {{"lambda", fit_lambda}, {"lambda_rel", fit_lambda_rel}}},
                {"sweep", {{"variable", sweep_variable}, {"values", sweep_values}}},
                {"groups_file", groups_file}};
    }

    std::string config_hash() const { return hex64(fnv1a64(to_json().dump())); }

    static PriorMode parse_prior(const std::string& s) {
        if (s == "none") return PriorMode::none;
        if (s == "conservation") return PriorMode::conservation;
        if (s == "spatial") return PriorMode::spatial;
        if (s == "spatial+equivalence" || s == "spatial_equivalence")
            return PriorMode::spatial_equivalence;
        if (s == "symmetry") return PriorMode::symmetry;
        throw Error(errc::bad_config, "unknown prior mode: " + s);
    }

    void apply_json(const nlohmann::json& j) {
        if (j.contains("experiment")) experiment = j["experiment"].get<std::string>();
        if (j.contains("prior")) prior = parse_prior(j["prior"].get<std::string>());
        if (j.contains("sigma")) sigma = j["sigma"].get<double>();
        if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
        if (j.contains("trials")) trials = j["trials"].get<std::size_t>();
        if (j.contains("threads")) threads = j["threads"].get<std::size_t>();
        if (j.contains("out")) out_dir = j["out"].get<std::string>();
        if (j.contains("exact_derivatives")) exact_derivatives = j["exact_derivatives"].get<bool>();
        if (j.contains("sampling")) {
            const auto& s = j["sampling"];
            if (s.contains("n_points")) n_points = s["n_points"].get<std::size_t>();
            if (s.contains("n_locations")) n_locations = s["n_locations"].get<std::size_t>();
            if (s.contains("n_times")) n_times = s["n_times"].get<std::size_t>();
            if (s.contains("n_samples")) n_samples = s["n_samples"].get<std::size_t>();
        }
        if (j.contains("differentiation")) {
            const auto& d = j["differentiation"];
            if (d.contains("time_window")) time_diff.window = d["time_window"].get<std::size_t>();
            if (d.contains("time_degree")) time_diff.degree = d["time_degree"].get<std::size_t>();
            if (d.contains("space_window")) space_diff.window = d["space_window"].get<std::size_t>();
            if (d.contains("space_degree")) space_diff.degree = d["space_degree"].get<std::size_t>();
        }
        if (j.contains("stability")) {
            const auto& s = j["stability"];
            if (s.contains("subsamples")) stability.subsamples = s["subsamples"].get<std::size_t>();
            if (s.contains("fraction")) stability.fraction = s["fraction"].get<double>();
            if (s.contains("n_lambda")) stability.n_lambda = s["n_lambda"].get<std::size_t>();
            if (s.contains("pi_threshold")) pi_th = s["pi_threshold"].get<double>();
            if (s.contains("expected_fp")) e_fp = s["expected_fp"].get<double>();
        }
        if (j.contains("fit")) {
            const auto& f = j["fit"];
            if (f.contains("lambda")) fit_lambda = f["lambda"].get<double>();
            if (f.contains("lambda_rel")) fit_lambda_rel = f["lambda_rel"].get<double>();
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            if (s.contains("variable")) sweep_variable = s["variable"].get<std::string>();
            if (s.contains("values")) sweep_values = s["values"].get<Vector>();
        }
        if (j.contains("groups_file")) groups_file = j["groups_file"].get<std::string>();
        require(pi_th > 0.5 && pi_th <= 1.0, errc::bad_config,
                "pi_threshold must lie in (0.5, 1]");
    }
};

/// Per-figure defaults; `custom` starts from the plain defaults.
inline ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    auto jak = [&](PriorMode p) {
        c.experiment = "jak-stat";
        c.prior = p;
        c.sigma = 0.1;
        c.n_points = 200;
    };
    auto adv = [&](PriorMode p) {
        c.experiment = "advection-diffusion";
        c.prior = p;
        c.sigma = 0.15;
    };
    auto rd = [&](PriorMode p) {
        c.experiment = "lambda-omega";
        c.prior = p;
        c.sigma = 0.1;
    };
    if (name == "custom") return c;
    if (name == "fig3a") {
        jak(PriorMode::conservation);
    } else if (name == "fig3b") {
        jak(PriorMode::none);
    } else if (name == "fig3c" || name == "fig3d") {
        jak(name == "fig3c" ? PriorMode::conservation : PriorMode::none);
        c.sweep_variable = "n_points";
        c.sweep_values = {50, 100, 150, 200, 300, 400, 500};
    } else if (name == "fig5a") {
        adv(PriorMode::spatial_equivalence);
    } else if (name == "fig5b") {
        adv(PriorMode::spatial);
    } else if (name == "fig5c") {
        adv(PriorMode::none);
    } else if (name == "fig5d") {
        adv(PriorMode::spatial_equivalence);
        c.sweep_variable = "sigma";
        c.sweep_values = {0.01, 0.05, 0.1, 0.15};
    } else if (name == "fig7a") {
        rd(PriorMode::symmetry);
    } else if (name == "fig7b") {
        rd(PriorMode::none);
    } else if (name == "fig7c" || name == "fig7d") {
        rd(name == "fig7c" ? PriorMode::symmetry : PriorMode::none);
        c.sweep_variable = "sigma";
        c.sweep_values = {0.01, 0.05, 0.1};
    } else if (name == "figA1") {
        jak(PriorMode::conservation);
    } else if (name == "figA2") {
        adv(PriorMode::spatial_equivalence);
        c.sigma = 0.01;
    } else {
        throw Error(errc::bad_config, "unknown preset: " + name);
    }
    return c;
}

inline JakStatExperiment make_jak_stat(const ExperimentConfig& c) {
    JakStatExperiment ex;
    ex.sim.n_points = c.n_points;
    ex.sigma = c.sigma;
    ex.time_diff = c.time_diff;
    ex.exact_derivatives = c.exact_derivatives;
    ex.prior = c.prior;
    return ex;
}

inline AdvectionDiffusionExperiment make_advection_diffusion(const ExperimentConfig& c) {
    AdvectionDiffusionExperiment ex;
    ex.sigma = c.sigma;
    ex.n_locations = c.n_locations;
    ex.n_times = c.n_times;
    ex.time_diff = c.time_diff;
    ex.space_diff = c.space_diff;
    ex.exact_derivatives = c.exact_derivatives;
    ex.prior = c.prior == PriorMode::conservation ? PriorMode::spatial_equivalence : c.prior;
    return ex;
}

inline LambdaOmegaExperiment make_lambda_omega(const ExperimentConfig& c) {
    LambdaOmegaExperiment ex;
    ex.sigma = c.sigma;
    ex.n_samples = c.n_samples;
    ex.time_diff = c.time_diff;
    ex.space_diff = c.space_diff;
    ex.exact_derivatives = c.exact_derivatives;
    ex.prior = c.prior == PriorMode::conservation ? PriorMode::symmetry : c.prior;
    return ex;
}

/// Builds one problem instance for the configured experiment. The clean
/// simulation is deterministic per configuration; noise and sampling derive
/// from (seed, trial).
class ProblemFactory {
  public:
    explicit ProblemFactory(const ExperimentConfig& cfg) : cfg_(cfg) {}

    RegressionProblem make(std::uint64_t noise_seed) {
        if (cfg_.experiment == "jak-stat") {
            auto ex = make_jak_stat(cfg_);
            return jak_stat_problem(ex, jak_clean(ex), noise_seed);
        }
        if (cfg_.experiment == "advection-diffusion") {
            auto ex = make_advection_diffusion(cfg_);
            return advection_diffusion_problem(ex, ad_clean(ex), noise_seed);
        }
        if (cfg_.experiment == "lambda-omega") {
            auto ex = make_lambda_omega(cfg_);
            return lambda_omega_problem(ex, lo_clean(ex), noise_seed);
        }
        throw Error(errc::bad_config, "unknown experiment: " + cfg_.experiment);
    }

    std::vector<std::string> truth() const {
        if (cfg_.experiment == "jak-stat") return jak_stat_truth(make_jak_stat(cfg_));
        if (cfg_.experiment == "advection-diffusion")
            return advection_diffusion_truth(make_advection_diffusion(cfg_));
        if (cfg_.experiment == "lambda-omega") return lambda_omega_truth(make_lambda_omega(cfg_));
        throw Error(errc::bad_config, "unknown experiment: " + cfg_.experiment);
    }

    std::size_t bound_group_size() const {
        PriorMode p = cfg_.prior;
        if (cfg_.experiment == "advection-diffusion")
            return prior_bound_group_size(make_advection_diffusion(cfg_).prior, cfg_.n_locations);
        if (cfg_.experiment == "lambda-omega")
            return prior_bound_group_size(make_lambda_omega(cfg_).prior);
        return prior_bound_group_size(p);
    }

    ExperimentConfig& config() { return cfg_; }

  private:
    // Clean simulations are cached per relevant configuration key.
    const TimeSeriesSet& jak_clean(const JakStatExperiment& ex) {
        auto key = ex.sim.n_points;
        auto it = jak_cache_.find(key);
        if (it == jak_cache_.end()) it = jak_cache_.emplace(key, jak_stat_clean(ex)).first;
        return it->second;
    }
    const SpatioTemporalField& ad_clean(const AdvectionDiffusionExperiment& ex) {
        if (!ad_cache_) ad_cache_ = advection_diffusion_clean(ex);
        return *ad_cache_;
    }
    const SpatioTemporalField& lo_clean(const LambdaOmegaExperiment& ex) {
        if (!lo_cache_) lo_cache_ = lambda_omega_clean(ex);
        return *lo_cache_;
    }

    ExperimentConfig cfg_;
    std::map<std::size_t, TimeSeriesSet> jak_cache_;
    std::optional<SpatioTemporalField> ad_cache_;
    std::optional<SpatioTemporalField> lo_cache_;
};

inline nlohmann::json run_sidecar(const ExperimentConfig& cfg) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return {{"config", cfg.to_json()},
            {"config_hash", cfg.config_hash()},
            {"timestamp_unix_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
}

/// simulate: write the clean simulated data plus a run sidecar.
inline void run_simulate(const ExperimentConfig& cfg) {
    const std::filesystem::path out(cfg.out_dir);
    if (cfg.experiment == "jak-stat") {
        auto ts = jak_stat_clean(make_jak_stat(cfg));
        series_to_csv(ts, out / "series.csv");
    } else if (cfg.experiment == "advection-diffusion") {
        auto f = advection_diffusion_clean(make_advection_diffusion(cfg));
        field_to_csv(f, out / "field.csv");
    } else if (cfg.experiment == "lambda-omega") {
        auto f = lambda_omega_clean(make_lambda_omega(cfg));
        field_to_csv(f, out / "field.csv");
    } else {
        throw Error(errc::bad_config, "unknown experiment: " + cfg.experiment);
    }
    write_json(out / "simulate_meta.json", run_sidecar(cfg));
}

/// fit: assemble one problem and solve at a single penalty.
inline ModelEstimate run_fit(const ExperimentConfig& cfg) {
    ProblemFactory factory(cfg);
    auto problem = factory.make(derive_seed(cfg.seed, 0));
    if (!cfg.groups_file.empty()) {
        auto gs = GroupStructure::from_json(read_json(cfg.groups_file));
        require(gs.p() == problem.cols(), errc::bad_config,
                "groups file covers " + std::to_string(gs.p()) + " columns, problem has " +
                    std::to_string(problem.cols()));
        problem.groups = std::move(gs);
    }
    SolverOptions sopts = cfg.stability.solver;
    sopts.lambda = cfg.fit_lambda >= 0.0 ? cfg.fit_lambda
                                         : cfg.fit_lambda_rel * lambda_max(problem, sopts);
    auto est = giht_solve(problem, sopts);
    const std::filesystem::path out(cfg.out_dir);
    auto j = estimate_to_json(est, problem.dict);
    j["meta"] = run_sidecar(cfg);
    write_json(out / "model.json", j);
    return est;
}

struct StabilityRun {
    StabilityPath path;
    SelectionResult selection;
};

inline StabilityRun stability_run(const ExperimentConfig& cfg, ProblemFactory& factory,
                                  std::uint64_t noise_seed) {
    auto problem = factory.make(noise_seed);
    StabilityOptions sopts = cfg.stability;
    sopts.threads = cfg.threads;
    sopts.seed = derive_seed(noise_seed, 0x57ab);
    StabilityRun run;
    run.path = stability_path(problem, sopts);
    SelectionCriteria crit{cfg.pi_th, cfg.e_fp, factory.bound_group_size()};
    run.selection = select_stable(run.path, crit);
    return run;
}

/// stability: importance curves over the path plus the selected stable set.
inline StabilityRun run_stability(const ExperimentConfig& cfg) {
    ProblemFactory factory(cfg);
    auto run = stability_run(cfg, factory, derive_seed(cfg.seed, 0));
    const std::filesystem::path out(cfg.out_dir);
    path_to_csv(run.path, out / "stability.csv");
    nlohmann::json sel = {{"stable_set", run.selection.stable_set},
                          {"lambda_s", run.selection.lambda_s},
                          {"pi_threshold", run.selection.pi_th},
                          {"expected_fp", run.selection.e_fp},
                          {"found", run.selection.found},
                          {"diagnostic", run.selection.diagnostic},
                          {"meta", run_sidecar(cfg)}};
    write_json(out / "selection.json", sel);
    return run;
}

inline ExperimentConfig sweep_point_config(const ExperimentConfig& cfg, double x) {
    ExperimentConfig point_cfg = cfg;
    if (cfg.sweep_variable == "n_points")
        point_cfg.n_points = static_cast<std::size_t>(x);
    else if (cfg.sweep_variable == "sigma")
        point_cfg.sigma = x;
    else
        throw Error(errc::bad_config, "unknown sweep variable: " + cfg.sweep_variable);
    return point_cfg;
}

/// achievability: exact-recovery probability over the configured sweep.
/// One factory (and thus one clean simulation) is cached per grid value.
inline AchievabilityCurve run_achievability(const ExperimentConfig& cfg) {
    require(!cfg.sweep_variable.empty() && !cfg.sweep_values.empty(), errc::bad_config,
            "achievability requires sweep.variable and sweep.values");
    ProblemFactory base(cfg);
    StabilityOptions sopts = cfg.stability;
    sopts.threads = cfg.threads;
    sopts.seed = cfg.seed;
    SelectionCriteria crit{cfg.pi_th, cfg.e_fp, base.bound_group_size()};

    std::map<double, std::unique_ptr<ProblemFactory>> factories;
    auto factory_for = [&](double x) -> ProblemFactory& {
        auto it = factories.find(x);
        if (it == factories.end())
            it = factories.emplace(x, std::make_unique<ProblemFactory>(sweep_point_config(cfg, x)))
                     .first;
        return *it->second;
    };

    auto curve = achievability(cfg.sweep_variable, cfg.sweep_values, cfg.trials, sopts, crit,
                               base.truth(), [&](double x, std::size_t trial) {
                                   return factory_for(x).make(derive_seed(
                                       cfg.seed, fnv1a64(format_double(x)), trial));
                               });
    const std::filesystem::path out(cfg.out_dir);
    curve_to_csv(curve, out / "achievability.csv");
    write_json(out / "achievability_meta.json", run_sidecar(cfg));
    return curve;
}

/// Stable-set fit for one trial: stability selection for the support, then
/// unpenalized least squares on the full problem restricted to it.
inline ModelEstimate stable_fit(const ExperimentConfig& cfg, ProblemFactory& factory,
                                std::uint64_t noise_seed, RegressionProblem& problem_out) {
    auto problem = factory.make(noise_seed);
    StabilityOptions sopts = cfg.stability;
    sopts.threads = cfg.threads;
    sopts.seed = derive_seed(noise_seed, 0x57ab);
    auto path = stability_path(problem, sopts);
    SelectionCriteria crit{cfg.pi_th, cfg.e_fp, factory.bound_group_size()};
    auto sel = select_stable(path, crit);

    ModelEstimate est;
    est.coefficients.assign(problem.cols(), 0.0);
    for (const auto& name : sel.stable_set) {
        auto g = problem.groups.find(name);
        if (!g) continue;
        est.support_groups.push_back(*g);
        est.support_names.push_back(name);
        for (std::size_t idx : problem.groups.group(*g).indices)
            est.support_columns.push_back(idx);
    }
    std::sort(est.support_columns.begin(), est.support_columns.end());
    est.coefficients = debias(problem, est.support_columns);
    est.lambda = sel.lambda_s;
    est.converged = sel.found;
    problem_out = std::move(problem);
    return est;
}

struct ReportTables {
    std::vector<std::vector<std::string>> coefficient_rows;  // name, truth, mean, std, rel_error
    std::vector<std::vector<std::string>> velocity_rows;     // x, c_hat, c_hat_std, c_true, ...
};

/// report: per-term coefficient errors averaged over trials; for the
/// advection-diffusion experiment also the latent velocity profile table.
inline ReportTables run_report(const ExperimentConfig& cfg) {
    ProblemFactory factory(cfg);
    std::vector<TruthTerm> truth_terms;
    if (cfg.experiment == "jak-stat")
        truth_terms = jak_stat_truth_terms(make_jak_stat(cfg));
    else if (cfg.experiment == "lambda-omega")
        truth_terms = lambda_omega_truth_terms(make_lambda_omega(cfg));

    ReportTables tables;
    const std::filesystem::path out(cfg.out_dir);

    if (cfg.experiment == "advection-diffusion") {
        // Hold the sampled locations fixed across trials so the profile can
        // be averaged per location; only the noise is redrawn.
        auto ex = make_advection_diffusion(cfg);
        const auto clean = advection_diffusion_clean(ex);
        const std::size_t hx = ex.space_diff.window / 2;
        const auto locations =
            sample_interior(clean.nx, hx, ex.n_locations, derive_seed(cfg.seed, 0xf1a2));
        const Vector c_true = advection_velocity(ex.sim);
        const Vector cx_true = spectral_derivative(c_true, ex.sim.length, 1);

        std::vector<Vector> c_hat(locations.size()), cx_hat(locations.size()),
            duu(locations.size());
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            auto problem = advection_diffusion_problem(ex, clean, derive_seed(cfg.seed, 0xad, t),
                                                       locations);
            StabilityOptions sopts = cfg.stability;
            sopts.threads = cfg.threads;
            sopts.seed = derive_seed(cfg.seed, 0x57ab, t);
            auto path = stability_path(problem, sopts);
            SelectionCriteria crit{cfg.pi_th, cfg.e_fp, factory.bound_group_size()};
            auto sel = select_stable(path, crit);
            std::vector<std::size_t> support;
            for (const auto& name : sel.stable_set) {
                auto g = problem.groups.find(name);
                if (!g) continue;
                for (std::size_t idx : problem.groups.group(*g).indices) support.push_back(idx);
            }
            auto coef = debias(problem, support);
            const TermLabel u = TermLabel::variable("u");
            const TermLabel ux = TermLabel::derivative("u", {1});
            const TermLabel uxx = TermLabel::derivative("u", {2});
            for (std::size_t li = 0; li < locations.size(); ++li) {
                auto block = problem.dict.find_block("u@" + std::to_string(locations[li]));
                if (!block) continue;
                auto cu = problem.dict.find_column(*block, u);
                auto cux = problem.dict.find_column(*block, ux);
                auto cuxx = problem.dict.find_column(*block, uxx);
                c_hat[li].push_back(-coef[*cux]);
                cx_hat[li].push_back(-coef[*cu]);
                duu[li].push_back(coef[*cuxx]);
            }
        }
        auto mean_std = [](const Vector& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= std::max<std::size_t>(1, v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            return std::pair<double, double>(mean,
                                             std::sqrt(var / std::max<std::size_t>(1, v.size())));
        };
        for (std::size_t li = 0; li < locations.size(); ++li) {
            auto [cm, cs] = mean_std(c_hat[li]);
            auto [gm, gs] = mean_std(cx_hat[li]);
            auto [dm, ds] = mean_std(duu[li]);
            const std::size_t ix = locations[li];
            tables.velocity_rows.push_back(
                {format_double(clean.x(ix)), format_double(cm), format_double(cs),
                 format_double(c_true[ix]), format_double(gm), format_double(gs),
                 format_double(cx_true[ix]), format_double(dm), format_double(ds)});
        }
        write_csv(out / "velocity.csv",
                  {"x", "c_hat", "c_hat_std", "c_true", "cx_hat", "cx_hat_std", "cx_true",
                   "du_hat", "du_hat_std"},
                  tables.velocity_rows);
        write_json(out / "report_meta.json", run_sidecar(cfg));
        return tables;
    }

    // Term-wise coefficient errors over trials.
    std::map<std::string, Vector> estimates;
    std::map<std::string, double> truths;
    std::map<std::string, Vector> rate_estimates;  // signalling cascade only
    std::map<std::string, double> rate_truths;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        RegressionProblem problem;
        auto est = stable_fit(cfg, factory, derive_seed(cfg.seed, 0xae, t), problem);
        auto errors = coefficient_errors(problem.dict, est, truth_terms);
        for (const auto& e : errors) {
            if (e.outcome == TermOutcome::false_positive) continue;
            estimates[e.name].push_back(e.estimate);
            truths[e.name] = e.truth;
        }
        if (cfg.experiment == "jak-stat") {
            for (const auto& r : jak_stat_rate_readouts(make_jak_stat(cfg))) {
                auto block = problem.dict.find_block(r.block);
                auto col = problem.dict.find_column(*block, r.label);
                rate_estimates[r.rate].push_back(r.multiplier * est.coefficients[*col]);
                rate_truths[r.rate] = r.truth;
            }
        }
    }
    auto emit = [&](const std::map<std::string, Vector>& by_name,
                    const std::map<std::string, double>& truth_by_name) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [name, vals] : by_name) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= std::max<std::size_t>(1, vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            const double sd = std::sqrt(var / std::max<std::size_t>(1, vals.size()));
            const double tr = truth_by_name.at(name);
            const double rel = tr != 0.0 ? std::abs(mean - tr) / std::abs(tr) : std::abs(mean);
            rows.push_back({name, format_double(tr), format_double(mean), format_double(sd),
                            format_double(rel)});
        }
        return rows;
    };
    tables.coefficient_rows =
        cfg.experiment == "jak-stat" ? emit(rate_estimates, rate_truths) : emit(estimates, truths);
    write_csv(out / "coefficients.csv", {"term", "truth", "estimate", "std", "rel_error"},
              tables.coefficient_rows);
    write_json(out / "report_meta.json", run_sidecar(cfg));
    return tables;
}

}  // namespace groupsparse
