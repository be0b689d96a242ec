#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "groupsparse/data.hpp"
#include "groupsparse/differentiate.hpp"
#include "groupsparse/error.hpp"
#include "groupsparse/matrix.hpp"
#include "groupsparse/rng.hpp"
#include "groupsparse/solver.hpp"

namespace groupsparse {

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        require(sigma >= 0.0, errc::invalid_argument, "noise sigma must be >= 0");
    }
};

inline double empirical_std(const Vector& u) {
    if (u.empty()) return 0.0;
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(u.size());
    double var = 0.0;
    for (double x : u) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(u.size()));
}

/// u_hat = u + sigma * N(0, std(u)): additive Gaussian noise whose standard
/// deviation is sigma times the empirical standard deviation of the clean
/// array. sigma = 0 returns the input unchanged (bit-exact).
inline Vector add_noise(const Vector& u, const NoiseSpec& spec) {
    spec.validate();
    if (spec.sigma == 0.0) return u;
    const double scale = spec.sigma * empirical_std(u);
    Rng rng(spec.seed);
    Vector out = u;
    for (auto& x : out) x += scale * rng.next_gaussian();
    return out;
}

/// Per-series noise scales (std per species); the seed is expanded per
/// series so the realization does not depend on series order consumption.
inline TimeSeriesSet add_noise(const TimeSeriesSet& ts, const NoiseSpec& spec) {
    spec.validate();
    TimeSeriesSet out = ts;
    for (std::size_t s = 0; s < out.series.size(); ++s)
        out.series[s].second =
            add_noise(ts.series[s].second, {spec.sigma, derive_seed(spec.seed, s)});
    return out;
}

inline SpatioTemporalField add_noise(const SpatioTemporalField& f, const NoiseSpec& spec) {
    spec.validate();
    SpatioTemporalField out = f;
    for (std::size_t s = 0; s < out.values.size(); ++s)
        out.values[s] = add_noise(f.values[s], {spec.sigma, derive_seed(spec.seed, s)});
    return out;
}

/// Distinct interior indices (at least `margin` from both ends), ascending.
inline std::vector<std::size_t> sample_interior(std::size_t n, std::size_t margin,
                                                std::size_t count, std::uint64_t seed) {
    require(n > 2 * margin, errc::invalid_argument, "sample_interior: no interior points");
    const std::size_t interior = n - 2 * margin;
    require(count <= interior, errc::invalid_argument,
            "sample_interior: more samples requested than interior points");
    Rng rng(seed);
    auto idx = rng.sample_without_replacement(interior, count);
    for (auto& i : idx) i += margin;
    return idx;
}

enum class TermOutcome { matched, missed, false_positive };

struct TruthTerm {
    std::string block;  // empty for single-block dictionaries
    TermLabel label;
    double value = 0.0;
};

struct CoefficientError {
    std::string name;
    TermOutcome outcome = TermOutcome::matched;
    double truth = 0.0;
    double estimate = 0.0;
    double error = 0.0;    // relative, or absolute when flagged
    bool absolute = false; // truth coefficient was zero
};

/// Per-term comparison of a fitted model against labeled ground truth:
/// relative errors for matched terms, plus explicit miss / false-positive
/// rows for support disagreements.
inline std::vector<CoefficientError> coefficient_errors(const Dictionary& dict,
                                                        const ModelEstimate& estimate,
                                                        const std::vector<TruthTerm>& truth) {
    std::vector<CoefficientError> out;
    std::vector<char> claimed(dict.cols(), 0);
    for (const auto& term : truth) {
        std::size_t block = 0;
        if (!term.block.empty()) {
            auto b = dict.find_block(term.block);
            require(b.has_value(), errc::invalid_argument,
                    "coefficient_errors: unknown block " + term.block);
            block = *b;
        }
        auto col = dict.find_column(block, term.label);
        require(col.has_value(), errc::invalid_argument,
                "coefficient_errors: truth term " + term.label.str() + " not in dictionary");
        claimed[*col] = 1;
        CoefficientError e;
        e.name = dict.column_name(*col);
        e.truth = term.value;
        e.estimate = estimate.coefficients[*col];
        const bool selected =
            std::find(estimate.support_columns.begin(), estimate.support_columns.end(), *col) !=
            estimate.support_columns.end();
        if (!selected) {
            e.outcome = TermOutcome::missed;
            e.error = std::abs(term.value);
            e.absolute = term.value == 0.0;
        } else if (term.value == 0.0) {
            e.outcome = TermOutcome::matched;
            e.error = std::abs(e.estimate);
            e.absolute = true;
        } else {
            e.outcome = TermOutcome::matched;
            e.error = std::abs(e.estimate - e.truth) / std::abs(e.truth);
        }
        out.push_back(std::move(e));
    }
    for (std::size_t col : estimate.support_columns) {
        if (claimed[col]) continue;
        CoefficientError e;
        e.name = dict.column_name(col);
        e.outcome = TermOutcome::false_positive;
        e.estimate = estimate.coefficients[col];
        e.error = std::abs(e.estimate);
        e.absolute = true;
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace groupsparse
