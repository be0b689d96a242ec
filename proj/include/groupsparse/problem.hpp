#pragma once

#include <utility>

#include "groupsparse/dictionary.hpp"
#include "groupsparse/groups.hpp"
#include "groupsparse/matrix.hpp"

#include <nlohmann/json.hpp>

namespace groupsparse {

/// A ready-to-solve instance: the candidate-term matrix, the estimated
/// time-derivative target, and the prior encoded as a group structure.
struct RegressionProblem {
    Dictionary dict;
    Vector target;
    GroupStructure groups;
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t rows() const { return dict.rows(); }
    std::size_t cols() const { return dict.cols(); }

    void validate() const {
        require(dict.rows() == target.size(), errc::dimension_mismatch,
                "problem: target length != dictionary rows");
        require(groups.p() == dict.cols(), errc::dimension_mismatch,
                "problem: group structure covers a different column count");
        require(dict.matrix.all_finite() && all_finite(target), errc::non_finite,
                "problem: non-finite entries");
    }
};

}  // namespace groupsparse
