#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "groupsparse/problem.hpp"
#include "groupsparse/rng.hpp"
#include "groupsparse/solver.hpp"

namespace groupsparse {

/// Runs fn(i) for i in [0, n). Work items must write results only to their
/// own index so the reduction is deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t k = std::min(threads, n);
    pool.reserve(k);
    for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

/// Restriction of a problem to a random row subset of size
/// ceil(fraction * rows), drawn without replacement. Block-diagonal problems
/// are subsampled within each block independently so no block empties.
inline RegressionProblem subsample_rows(const RegressionProblem& problem, double fraction,
                                        std::uint64_t seed) {
    require(fraction > 0.0 && fraction <= 1.0, errc::invalid_argument,
            "subsample_rows: fraction must be in (0, 1]");
    problem.validate();

    std::vector<std::size_t> keep;  // global row indices, ascending
    std::vector<DictionaryBlock> new_blocks;
    std::size_t row0 = 0;
    for (std::size_t b = 0; b < problem.dict.blocks.size(); ++b) {
        const auto& blk = problem.dict.blocks[b];
        const std::size_t k =
            static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(blk.row_count)));
        require(k >= 2, errc::invalid_argument,
                "subsample_rows: block " + blk.name + " would keep fewer than 2 rows");
        Rng rng(derive_seed(seed, b));
        auto local = rng.sample_without_replacement(blk.row_count, k);
        for (std::size_t i : local) keep.push_back(blk.row_begin + i);
        DictionaryBlock nb = blk;
        nb.row_begin = row0;
        nb.row_count = k;
        new_blocks.push_back(nb);
        row0 += k;
    }

    RegressionProblem out;
    out.dict.labels = problem.dict.labels;
    out.dict.blocks = std::move(new_blocks);
    out.dict.block_of_col = problem.dict.block_of_col;
    out.dict.matrix = DenseMatrix(keep.size(), problem.cols());
    out.target.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const double* src = problem.dict.matrix.row(keep[i]);
        double* dst = out.dict.matrix.row(i);
        for (std::size_t j = 0; j < problem.cols(); ++j) dst[j] = src[j];
        out.target[i] = problem.target[keep[i]];
    }
    out.groups = problem.groups;
    out.metadata = problem.metadata;
    out.metadata["subsample"] = {{"fraction", fraction}, {"seed", seed}};
    return out;
}

struct StabilityOptions {
    std::size_t subsamples = 100;  // B
    double fraction = 0.5;
    std::size_t n_lambda = 25;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    SolverOptions solver;
};

struct StabilityPath {
    Vector lambdas;  // strictly decreasing, lambda_max down to 0.1 lambda_max
    std::vector<std::string> group_names;
    std::vector<std::size_t> group_sizes;
    DenseMatrix importance;      // group x lambda selection frequencies
    Vector mean_selected;        // q(lambda): mean groups selected per subsample
    std::vector<std::size_t> failures;  // solver failures per lambda, excluded from averages
    std::size_t p_columns = 0;
    std::size_t subsamples = 0;
    double fraction = 0.0;
    std::uint64_t seed = 0;
    double lambda_max_value = 0.0;

    double importance_of(const std::string& name, std::size_t li) const {
        for (std::size_t g = 0; g < group_names.size(); ++g)
            if (group_names[g] == name) return importance(g, li);
        throw Error(errc::invalid_argument, "no group named " + name);
    }
};

/// Selection frequencies of every group over the regularization path
/// [lambda_max, 0.1 lambda_max] under B random row subsamples.
inline StabilityPath stability_path(const RegressionProblem& problem,
                                    const StabilityOptions& opts) {
    require(opts.subsamples >= 1, errc::invalid_argument, "stability_path: B >= 1");
    require(opts.n_lambda >= 2, errc::invalid_argument, "stability_path: n_lambda >= 2");
    problem.validate();

    StabilityPath path;
    path.p_columns = problem.cols();
    path.subsamples = opts.subsamples;
    path.fraction = opts.fraction;
    path.seed = opts.seed;
    path.lambda_max_value = lambda_max(problem, opts.solver);
    require(path.lambda_max_value > 0.0, errc::invalid_argument,
            "stability_path: lambda_max is zero (empty problem)");

    const std::size_t nl = opts.n_lambda;
    path.lambdas.resize(nl);
    for (std::size_t i = 0; i < nl; ++i)
        path.lambdas[i] = path.lambda_max_value *
                          std::pow(0.1, static_cast<double>(i) / static_cast<double>(nl - 1));

    const std::size_t m = problem.groups.group_count();
    for (const auto& g : problem.groups.groups()) {
        path.group_names.push_back(g.name);
        path.group_sizes.push_back(g.size());
    }

    // One selection bitmap per subsample, written independently then reduced
    // in index order.
    const std::size_t b_count = opts.subsamples;
    std::vector<std::vector<char>> selected(b_count);   // m * nl bitmaps
    std::vector<std::vector<char>> cell_ok(b_count);    // per-lambda success flags
    parallel_for(b_count, opts.threads, [&](std::size_t b) {
        selected[b].assign(m * nl, 0);
        cell_ok[b].assign(nl, 0);
        try {
            auto sub = subsample_rows(problem, opts.fraction, derive_seed(opts.seed, b));
            GihtWorkspace ws(sub, opts.solver);
            for (std::size_t li = 0; li < nl; ++li) {
                try {
                    auto est = ws.solve(path.lambdas[li]);
                    cell_ok[b][li] = 1;
                    for (std::size_t g : est.support_groups) selected[b][g * nl + li] = 1;
                } catch (const Error&) {
                    // recorded as a per-cell failure below
                }
            }
        } catch (const Error&) {
            // whole-subsample failure: all cells remain failed
        }
    });

    path.importance = DenseMatrix(m, nl);
    path.mean_selected.assign(nl, 0.0);
    path.failures.assign(nl, 0);
    for (std::size_t li = 0; li < nl; ++li) {
        std::size_t ok = 0;
        for (std::size_t b = 0; b < b_count; ++b)
            if (cell_ok[b][li]) ++ok;
        path.failures[li] = b_count - ok;
        const double denom = ok > 0 ? static_cast<double>(ok) : 1.0;
        double total = 0.0;
        for (std::size_t g = 0; g < m; ++g) {
            std::size_t hits = 0;
            for (std::size_t b = 0; b < b_count; ++b)
                if (cell_ok[b][li] && selected[b][g * nl + li]) ++hits;
            path.importance(g, li) = static_cast<double>(hits) / denom;
            total += static_cast<double>(hits);
        }
        path.mean_selected[li] = total / denom;
    }
    return path;
}

/// Generalized binomial coefficient C(q, k) with real-valued q.
inline double real_binomial(double q, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        r *= (q - static_cast<double>(i)) / static_cast<double>(i + 1);
    return r;
}

/// Importance threshold bound: 1/2 + C(q,k)^2 / (2 C(p,k) E_fp).
inline double pi_threshold(double q, std::size_t p, std::size_t k, double e_fp) {
    require(q >= 0.0, errc::invalid_argument, "pi_threshold: q >= 0");
    require(k >= 1, errc::invalid_argument, "pi_threshold: k >= 1");
    require(e_fp > 0.0, errc::invalid_argument, "pi_threshold: E_fp > 0");
    const double cq = real_binomial(q, k);
    const double cp = real_binomial(static_cast<double>(p), k);
    return 0.5 + cq * cq / (2.0 * cp * e_fp);
}

struct SelectionCriteria {
    double pi_th = 0.8;
    double e_fp = 1.0;
    std::size_t k = 1;  // group size used in the false-positive bound
};

struct SelectionResult {
    std::vector<std::string> stable_set;  // sorted group names
    double lambda_s = 0.0;
    std::size_t lambda_index = 0;
    double pi_th = 0.8;
    double e_fp = 1.0;
    bool found = false;
    std::string diagnostic;
};

/// Walks the path from lambda_max downward while the implied false-positive
/// bound (Eq. solved for E_fp at the chosen pi_th and the observed mean
/// selection count) stays within e_fp; lambda_s is the last admissible
/// point, and the stable set collects groups at or above pi_th there.
inline SelectionResult select_stable(const StabilityPath& path, const SelectionCriteria& crit) {
    require(crit.pi_th > 0.5 && crit.pi_th <= 1.0, errc::invalid_argument,
            "select_stable: pi_th must lie in (0.5, 1]");
    SelectionResult res;
    res.pi_th = crit.pi_th;
    res.e_fp = crit.e_fp;

    const double cp = real_binomial(static_cast<double>(path.p_columns), crit.k);
    std::size_t last_ok = path.lambdas.size();
    for (std::size_t li = 0; li < path.lambdas.size(); ++li) {
        const double cq = real_binomial(path.mean_selected[li], crit.k);
        const double implied = cq * cq / (2.0 * cp * (crit.pi_th - 0.5));
        if (implied > crit.e_fp) break;
        last_ok = li;
    }
    if (last_ok == path.lambdas.size()) {
        res.found = false;
        res.diagnostic = "no lambda on the path satisfies the false-positive bound";
        return res;
    }
    res.found = true;
    res.lambda_index = last_ok;
    res.lambda_s = path.lambdas[last_ok];
    for (std::size_t g = 0; g < path.group_names.size(); ++g)
        if (path.importance(g, last_ok) >= crit.pi_th)
            res.stable_set.push_back(path.group_names[g]);
    std::sort(res.stable_set.begin(), res.stable_set.end());
    return res;
}

struct AchievabilityPoint {
    double x = 0.0;  // grid value (sample count or noise level)
    double success_prob = 0.0;
    double band = 0.0;  // Bernoulli standard deviation sqrt(p(1-p)/T)
    std::size_t trials = 0;
    std::size_t failures = 0;  // pipeline errors, counted as non-success
};

struct AchievabilityCurve {
    std::string axis;
    std::vector<AchievabilityPoint> points;
};

/// Exact-recovery probability over independent trials for each grid value.
/// make_problem(x, trial) must build a freshly-randomized problem instance;
/// success is strict set equality between the stable set and `truth`.
template <typename MakeProblem>
AchievabilityCurve achievability(const std::string& axis, const Vector& grid, std::size_t trials,
                                 const StabilityOptions& sopts, const SelectionCriteria& crit,
                                 std::vector<std::string> truth, MakeProblem&& make_problem) {
    require(trials >= 1, errc::invalid_argument, "achievability: trials >= 1");
    require(!truth.empty(), errc::invalid_argument, "achievability: empty truth set");
    std::sort(truth.begin(), truth.end());

    AchievabilityCurve curve;
    curve.axis = axis;
    for (std::size_t xi = 0; xi < grid.size(); ++xi) {
        AchievabilityPoint pt;
        pt.x = grid[xi];
        pt.trials = trials;
        std::size_t successes = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            try {
                RegressionProblem problem = make_problem(grid[xi], t);
                StabilityOptions so = sopts;
                so.seed = derive_seed(sopts.seed, xi * 7919 + 31, t);
                auto path = stability_path(problem, so);
                auto sel = select_stable(path, crit);
                if (sel.found && sel.stable_set == truth) ++successes;
            } catch (const Error&) {
                ++pt.failures;  // simulator/solver failure counts as non-success
            }
        }
        pt.success_prob = static_cast<double>(successes) / static_cast<double>(trials);
        pt.band = std::sqrt(pt.success_prob * (1.0 - pt.success_prob) /
                            static_cast<double>(trials));
        curve.points.push_back(pt);
    }
    return curve;
}

}  // namespace groupsparse
