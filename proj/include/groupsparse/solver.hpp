#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "groupsparse/linalg.hpp"
#include "groupsparse/problem.hpp"

#include <nlohmann/json.hpp>

namespace groupsparse {

struct SolverOptions {
    double lambda = 0.0;             // group-sparsity penalty weight
    std::size_t max_iter = 10000;
    double tol = 1e-8;               // relative coefficient-change threshold
    std::size_t support_stable_iters = 3;
    bool normalize = true;           // unit-normalize dictionary columns internally
    double power_tol = 1e-6;
    std::size_t power_max_iter = 1000;
};

struct ModelEstimate {
    std::vector<std::size_t> support_groups;   // indices into the group structure
    std::vector<std::string> support_names;
    std::vector<std::size_t> support_columns;  // sorted, 0-based
    Vector coefficients;                       // length p, original column scaling
    double residual_norm = 0.0;
    std::size_t iterations_used = 0;
    bool converged = false;
    double lambda = 0.0;
    std::vector<std::string> warnings;

    bool selected(const std::string& name) const {
        return std::find(support_names.begin(), support_names.end(), name) != support_names.end();
    }
};

/// Keep-or-zero rule per group: the group survives iff ||v_g||_2^2 is at
/// least lambda * sqrt(p_g); the boundary case keeps the group.
inline bool group_survives(double norm_sq, std::size_t group_size, double lambda) {
    return norm_sq >= lambda * std::sqrt(static_cast<double>(group_size));
}

inline Vector group_hard_threshold(const Vector& v, const GroupStructure& gs, double lambda) {
    require(v.size() == gs.p(), errc::dimension_mismatch,
            "group_hard_threshold: vector length != group column count");
    require(lambda >= 0.0, errc::invalid_argument, "group_hard_threshold: lambda must be >= 0");
    Vector out(v.size(), 0.0);
    for (const auto& g : gs.groups()) {
        double nsq = 0.0;
        for (std::size_t idx : g.indices) nsq += v[idx] * v[idx];
        if (group_survives(nsq, g.size(), lambda))
            for (std::size_t idx : g.indices) out[idx] = v[idx];
    }
    return out;
}

/// Prepared solver state for one problem instance: normalized columns,
/// per-block Gram matrices and correlations, and the gradient step size.
/// Building it once and sweeping lambda is how the stability path avoids
/// re-factorizing anything.
class GihtWorkspace {
  public:
    GihtWorkspace(const RegressionProblem& problem, const SolverOptions& opts = {})
        : opts_(opts), groups_(problem.groups) {
        problem.validate();
        const Dictionary& dict = problem.dict;
        p_ = dict.cols();
        n_ = dict.rows();

        if (opts_.normalize) {
            auto nc = normalize_columns(dict.matrix);
            theta_ = std::move(nc.matrix);
            scales_ = std::move(nc.scales);
            if (!nc.zero_columns.empty())
                warnings_.push_back(std::to_string(nc.zero_columns.size()) +
                                    " all-zero dictionary column(s); scale reported as 1");
        } else {
            theta_ = dict.matrix;
            scales_.assign(p_, 1.0);
        }

        target_ = problem.target;
        target_norm_sq_ = norm2_sq(target_);

        // Per-block Gram and correlation. Block-diagonal structure means no
        // cross-block products exist, so this is the full Theta^T Theta.
        blocks_ = dict.blocks;
        block_of_col_ = dict.block_of_col;
        double lam_max_gram = 0.0;
        for (const auto& blk : blocks_) {
            BlockData bd;
            bd.col_begin = blk.col_begin;
            bd.cols = blk.col_count;
            bd.gram = DenseMatrix(bd.cols, bd.cols);
            bd.corr.assign(bd.cols, 0.0);
            for (std::size_t i = blk.row_begin; i < blk.row_begin + blk.row_count; ++i) {
                const double* row = theta_.row(i);
                const double ti = target_[i];
                for (std::size_t a = 0; a < bd.cols; ++a) {
                    const double ra = row[blk.col_begin + a];
                    if (ra == 0.0) continue;
                    bd.corr[a] += ra * ti;
                    for (std::size_t b = a; b < bd.cols; ++b)
                        bd.gram(a, b) += ra * row[blk.col_begin + b];
                }
            }
            for (std::size_t a = 0; a < bd.cols; ++a)
                for (std::size_t b = a + 1; b < bd.cols; ++b) bd.gram(b, a) = bd.gram(a, b);

            auto pit = power_iteration_sym(bd.gram, opts_.power_tol, opts_.power_max_iter);
            double blk_lam = pit.value;
            if (!pit.converged) {
                // Safe upper bound: trace dominates the top eigenvalue.
                double tr = 0.0;
                for (std::size_t a = 0; a < bd.cols; ++a) tr += bd.gram(a, a);
                blk_lam = tr;
                warnings_.push_back("step-size power iteration hit cap in block " + blk.name +
                                    "; using trace bound");
            }
            lam_max_gram = std::max(lam_max_gram, blk_lam);
            block_data_.push_back(std::move(bd));
        }
        mu_ = lam_max_gram > 0.0 ? 1.0 / lam_max_gram : 1.0;

        // First gradient step from 0 (shared by every lambda).
        v0_.assign(p_, 0.0);
        for (const auto& bd : block_data_)
            for (std::size_t a = 0; a < bd.cols; ++a) v0_[bd.col_begin + a] = mu_ * bd.corr[a];
    }

    std::size_t p() const { return p_; }
    double mu() const { return mu_; }
    const GroupStructure& groups() const { return groups_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Smallest penalty at which the first thresholding step zeroes every
    /// group: max over groups of ||v0_g||^2 / sqrt(p_g).
    double lambda_max() const {
        double lm = 0.0;
        for (const auto& g : groups_.groups()) {
            double nsq = 0.0;
            for (std::size_t idx : g.indices) nsq += v0_[idx] * v0_[idx];
            lm = std::max(lm, nsq / std::sqrt(static_cast<double>(g.size())));
        }
        return lm;
    }

    /// One full gIHT run at the given penalty. Deterministic and reentrant.
    ModelEstimate solve(double lambda) const {
        require(lambda >= 0.0, errc::invalid_argument, "solve: lambda must be >= 0");
        const std::size_t m = groups_.group_count();

        Vector xi(p_, 0.0);
        Vector v(p_, 0.0);
        std::vector<char> active(m, 0), prev_active(m, 0);
        std::vector<char> debiased_on(m, 2);  // sentinel != 0/1 forces first de-bias
        bool used_fallback = false;

        ModelEstimate est;
        est.lambda = lambda;
        std::size_t stable = 0;
        std::size_t it = 0;
        for (it = 1; it <= opts_.max_iter; ++it) {
            // v = xi - mu * grad = xi + mu * (corr - G xi)
            for (std::size_t j = 0; j < p_; ++j) v[j] = 0.0;
            for (const auto& bd : block_data_) {
                bool any = false;
                for (std::size_t a = 0; a < bd.cols; ++a)
                    if (xi[bd.col_begin + a] != 0.0) {
                        any = true;
                        break;
                    }
                for (std::size_t a = 0; a < bd.cols; ++a) {
                    double gx = 0.0;
                    if (any) {
                        const double* grow = bd.gram.row(a);
                        for (std::size_t b = 0; b < bd.cols; ++b)
                            gx += grow[b] * xi[bd.col_begin + b];
                    }
                    const std::size_t j = bd.col_begin + a;
                    v[j] = xi[j] + mu_ * (bd.corr[a] - gx);
                }
            }

            // Group thresholding -> new support.
            bool any_nonfinite = false;
            for (std::size_t g = 0; g < m; ++g) {
                double nsq = 0.0;
                for (std::size_t idx : groups_.group(g).indices) nsq += v[idx] * v[idx];
                if (!std::isfinite(nsq)) any_nonfinite = true;
                active[g] = group_survives(nsq, groups_.group(g).size(), lambda) ? 1 : 0;
            }
            if (any_nonfinite)
                throw Error(errc::non_finite,
                            "giht: non-finite iterate at iteration " + std::to_string(it));

            // De-bias on the support (unrestricted least squares); skip if
            // the support did not change since the last factorization.
            if (active != debiased_on) {
                Vector next(p_, 0.0);
                if (!debias_on_support(active, next)) used_fallback = true;
                debiased_on = active;
                double num = 0.0, den = 0.0;
                for (std::size_t j = 0; j < p_; ++j) {
                    const double d = next[j] - xi[j];
                    num += d * d;
                    den += next[j] * next[j];
                }
                const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
                xi = std::move(next);
                stable = (active == prev_active && rel < opts_.tol) ? stable + 1 : 0;
            } else {
                stable = active == prev_active ? stable + 1 : 0;
            }
            prev_active = active;
            if (stable >= opts_.support_stable_iters) {
                est.converged = true;
                break;
            }
        }
        est.iterations_used = std::min(it, opts_.max_iter);

        for (std::size_t g = 0; g < m; ++g) {
            if (!active[g]) continue;
            est.support_groups.push_back(g);
            est.support_names.push_back(groups_.group(g).name);
            for (std::size_t idx : groups_.group(g).indices) est.support_columns.push_back(idx);
        }
        std::sort(est.support_columns.begin(), est.support_columns.end());

        // Residual on the normalized problem equals the original residual.
        Vector fit(n_, 0.0);
        for (std::size_t j : est.support_columns) {
            const double xj = xi[j];
            if (xj == 0.0) continue;
            for (std::size_t i = 0; i < n_; ++i) fit[i] += theta_(i, j) * xj;
        }
        double rsq = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double d = target_[i] - fit[i];
            rsq += d * d;
        }
        est.residual_norm = std::sqrt(rsq);

        est.coefficients.assign(p_, 0.0);
        for (std::size_t j : est.support_columns) est.coefficients[j] = xi[j] / scales_[j];
        est.warnings = warnings_;
        if (used_fallback)
            est.warnings.push_back("singular de-biasing system; minimum-norm least squares used");
        return est;
    }

  private:
    struct BlockData {
        std::size_t col_begin = 0;
        std::size_t cols = 0;
        DenseMatrix gram;
        Vector corr;
    };

    /// Per-block Cholesky solve of the support-restricted normal equations;
    /// QR on the support columns as fallback. Returns false if the fallback
    /// was needed.
    bool debias_on_support(const std::vector<char>& active, Vector& xi) const {
        bool clean = true;
        for (std::size_t bi = 0; bi < block_data_.size(); ++bi) {
            const BlockData& bd = block_data_[bi];
            std::vector<std::size_t> local;
            for (std::size_t a = 0; a < bd.cols; ++a)
                if (active[groups_.group_of(bd.col_begin + a)]) local.push_back(a);
            if (local.empty()) continue;
            const std::size_t k = local.size();
            DenseMatrix g(k, k);
            Vector rhs(k, 0.0);
            for (std::size_t a = 0; a < k; ++a) {
                rhs[a] = bd.corr[local[a]];
                for (std::size_t b = 0; b < k; ++b) g(a, b) = bd.gram(local[a], local[b]);
            }
            if (cholesky_solve(std::move(g), rhs)) {
                for (std::size_t a = 0; a < k; ++a) xi[bd.col_begin + local[a]] = rhs[a];
                continue;
            }
            clean = false;
            // Rank-deficient support block: fall back to QR (minimum-norm).
            const auto& blk = blocks_[bi];
            DenseMatrix sub(blk.row_count, k);
            Vector bsub(blk.row_count, 0.0);
            for (std::size_t i = 0; i < blk.row_count; ++i) {
                bsub[i] = target_[blk.row_begin + i];
                for (std::size_t a = 0; a < k; ++a)
                    sub(i, a) = theta_(blk.row_begin + i, bd.col_begin + local[a]);
            }
            Vector sol = least_squares(sub, bsub);
            for (std::size_t a = 0; a < k; ++a) xi[bd.col_begin + local[a]] = sol[a];
        }
        return clean;
    }

    SolverOptions opts_;
    GroupStructure groups_;
    std::size_t p_ = 0, n_ = 0;
    DenseMatrix theta_;
    Vector scales_;
    Vector target_;
    double target_norm_sq_ = 0.0;
    double mu_ = 1.0;
    Vector v0_;
    std::vector<DictionaryBlock> blocks_;
    std::vector<std::size_t> block_of_col_;
    std::vector<BlockData> block_data_;
    std::vector<std::string> warnings_;
};

/// Group iterative hard thresholding with de-biasing at a single penalty.
inline ModelEstimate giht_solve(const RegressionProblem& problem, const SolverOptions& opts) {
    GihtWorkspace ws(problem, opts);
    return ws.solve(opts.lambda);
}

/// Penalty value above which the very first thresholding step empties the
/// model. Anchors the regularization path.
inline double lambda_max(const RegressionProblem& problem, const SolverOptions& opts = {}) {
    return GihtWorkspace(problem, opts).lambda_max();
}

/// Unrestricted least squares on the given support columns (QR; minimum-norm
/// when rank deficient); zeros elsewhere. An empty support yields zeros.
inline Vector debias(const RegressionProblem& problem, const std::vector<std::size_t>& support) {
    problem.validate();
    Vector out(problem.cols(), 0.0);
    if (support.empty()) return out;
    std::vector<std::size_t> cols = support;
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    require(cols.back() < problem.cols(), errc::invalid_argument, "debias: column out of range");
    DenseMatrix sub(problem.rows(), cols.size());
    for (std::size_t i = 0; i < problem.rows(); ++i)
        for (std::size_t a = 0; a < cols.size(); ++a) sub(i, a) = problem.dict.matrix(i, cols[a]);
    Vector sol = least_squares(sub, problem.target);
    for (std::size_t a = 0; a < cols.size(); ++a) out[cols[a]] = sol[a];
    return out;
}

}  // namespace groupsparse
