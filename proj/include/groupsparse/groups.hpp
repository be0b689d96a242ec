#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "groupsparse/dictionary.hpp"
#include "groupsparse/error.hpp"

#include <nlohmann/json.hpp>

namespace groupsparse {

struct Group {
    std::string name;
    std::vector<std::size_t> indices;  // 0-based, sorted

    std::size_t size() const { return indices.size(); }
};

/// A partition of the column indices {0..p-1} into named non-overlapping
/// groups. Columns not mentioned by any declared group become singleton
/// groups, so the structure always covers all p columns.
class GroupStructure {
  public:
    GroupStructure() = default;

    /// Builds from declared groups; remaining columns are completed as
    /// singletons named by singleton_name(col) when provided.
    template <typename NameFn>
    GroupStructure(std::size_t p, std::vector<Group> declared, NameFn&& singleton_name)
        : p_(p), groups_(std::move(declared)) {
        std::vector<char> seen(p, 0);
        for (auto& g : groups_) {
            std::sort(g.indices.begin(), g.indices.end());
            require(!g.indices.empty(), errc::invalid_argument,
                    "group " + g.name + " is empty");
            for (std::size_t idx : g.indices) {
                require(idx < p, errc::invalid_argument,
                        "group " + g.name + ": index out of range");
                require(!seen[idx], errc::invalid_argument,
                        "groups overlap at column " + std::to_string(idx + 1));
                seen[idx] = 1;
            }
        }
        for (std::size_t j = 0; j < p; ++j)
            if (!seen[j]) groups_.push_back({singleton_name(j), {j}});
        rebuild_index();
    }

    GroupStructure(std::size_t p, std::vector<Group> declared)
        : GroupStructure(p, std::move(declared),
                         [](std::size_t j) { return "col" + std::to_string(j + 1); }) {}

    std::size_t p() const { return p_; }
    std::size_t group_count() const { return groups_.size(); }
    const std::vector<Group>& groups() const { return groups_; }
    const Group& group(std::size_t g) const { return groups_[g]; }
    std::size_t group_of(std::size_t col) const { return group_of_[col]; }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t g = 0; g < groups_.size(); ++g)
            if (groups_[g].name == name) return g;
        return std::nullopt;
    }

    /// All-singleton structure over p columns ("no prior").
    static GroupStructure singletons(std::size_t p) { return GroupStructure(p, {}); }

    static GroupStructure singletons(const Dictionary& dict) {
        return GroupStructure(dict.cols(), {},
                              [&](std::size_t j) { return dict.column_name(j); });
    }

    nlohmann::json to_json() const {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& g : groups_) {
            nlohmann::json idx = nlohmann::json::array();
            for (std::size_t i : g.indices) idx.push_back(i + 1);  // 1-indexed on disk
            groups.push_back({{"name", g.name}, {"indices", idx}});
        }
        return {{"p", p_}, {"groups", groups}};
    }

    static GroupStructure from_json(const nlohmann::json& j) {
        require(j.contains("p") && j.contains("groups"), errc::bad_config,
                "group JSON must contain \"p\" and \"groups\"");
        std::size_t p = j.at("p").get<std::size_t>();
        std::vector<Group> declared;
        for (const auto& gj : j.at("groups")) {
            Group g;
            g.name = gj.at("name").get<std::string>();
            for (const auto& idx : gj.at("indices")) {
                std::size_t i = idx.get<std::size_t>();
                require(i >= 1 && i <= p, errc::bad_config,
                        "group " + g.name + ": 1-indexed column out of range");
                g.indices.push_back(i - 1);
            }
            declared.push_back(std::move(g));
        }
        return GroupStructure(p, std::move(declared));
    }

  private:
    void rebuild_index() {
        group_of_.assign(p_, 0);
        for (std::size_t g = 0; g < groups_.size(); ++g)
            for (std::size_t idx : groups_[g].indices) group_of_[idx] = g;
    }

    std::size_t p_ = 0;
    std::vector<Group> groups_;
    std::vector<std::size_t> group_of_;
};

struct GroupViolation {
    std::string what;
};

/// Checks a raw group list against a column count without completing it.
/// In strict mode coverage gaps are violations; otherwise only overlaps and
/// out-of-range indices are.
inline std::vector<GroupViolation> validate_groups(std::size_t p, const std::vector<Group>& groups,
                                                   bool strict = false) {
    std::vector<GroupViolation> out;
    std::vector<int> owner(p, -1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t idx : groups[g].indices) {
            if (idx >= p) {
                out.push_back({"group " + groups[g].name + ": column " + std::to_string(idx + 1) +
                               " out of range (p = " + std::to_string(p) + ")"});
                continue;
            }
            if (owner[idx] >= 0)
                out.push_back({"column " + std::to_string(idx + 1) + " appears in groups " +
                               groups[static_cast<std::size_t>(owner[idx])].name + " and " +
                               groups[g].name});
            owner[idx] = static_cast<int>(g);
        }
    }
    if (strict)
        for (std::size_t j = 0; j < p; ++j)
            if (owner[j] < 0)
                out.push_back({"column " + std::to_string(j + 1) + " is not covered by any group"});
    return out;
}

struct ConservationPair {
    std::string name;        // group name, e.g. "g1"
    TermLabel label;         // tied term
    std::string source_block;
    std::string sink_block;
};

/// One group per conserved reaction: the named term's column in the source
/// equation block tied to its column in the sink block. All other columns
/// stay singletons.
inline GroupStructure conservation_groups(const Dictionary& dict,
                                          const std::vector<ConservationPair>& pairs) {
    std::vector<Group> declared;
    for (const auto& pr : pairs) {
        auto bs = dict.find_block(pr.source_block);
        auto bt = dict.find_block(pr.sink_block);
        require(bs && bt, errc::invalid_argument,
                "conservation_groups: unknown block in pair " + pr.name);
        auto cs = dict.find_column(*bs, pr.label);
        auto ct = dict.find_column(*bt, pr.label);
        require(cs && ct, errc::invalid_argument,
                "conservation_groups: term " + pr.label.str() + " missing from block " +
                    (cs ? pr.sink_block : pr.source_block));
        declared.push_back({pr.name, {*cs, *ct}});
    }
    return GroupStructure(dict.cols(), std::move(declared),
                          [&](std::size_t j) { return dict.column_name(j); });
}

/// Spatial-variability grouping for a uniform-width block dictionary:
/// group l ties local column l across all p_g blocks.
inline GroupStructure spatial_groups(std::size_t p, std::size_t p_g,
                                     const std::vector<std::string>& names = {}) {
    require(p >= 1 && p_g >= 1, errc::invalid_argument, "spatial_groups: p, p_g >= 1");
    require(names.empty() || names.size() == p, errc::invalid_argument,
            "spatial_groups: one name per local column required");
    std::vector<Group> declared;
    for (std::size_t l = 0; l < p; ++l) {
        Group g;
        g.name = names.empty() ? "g" + std::to_string(l + 1) : names[l];
        for (std::size_t k = 0; k < p_g; ++k) g.indices.push_back(l + k * p);
        declared.push_back(std::move(g));
    }
    return GroupStructure(p * p_g, std::move(declared));
}

/// Concatenates two structures over adjacent column ranges and merges the
/// named pairs (model-equivalence prior). Unpaired groups are preserved.
inline GroupStructure union_groups(const GroupStructure& a, const GroupStructure& b,
                                   const std::vector<std::pair<std::string, std::string>>& pairing) {
    const std::size_t p = a.p() + b.p();
    std::vector<Group> declared;
    std::vector<char> b_merged(b.group_count(), 0);
    for (const auto& ga : a.groups()) {
        Group g = ga;
        for (const auto& [na, nb] : pairing) {
            if (na != ga.name) continue;
            auto idx = b.find(nb);
            require(idx.has_value(), errc::invalid_argument, "union_groups: no group named " + nb);
            require(!b_merged[*idx], errc::invalid_argument,
                    "union_groups: group " + nb + " paired twice");
            b_merged[*idx] = 1;
            for (std::size_t i : b.group(*idx).indices) g.indices.push_back(i + a.p());
        }
        declared.push_back(std::move(g));
    }
    for (std::size_t gb = 0; gb < b.group_count(); ++gb) {
        if (b_merged[gb]) continue;
        Group g = b.group(gb);
        for (auto& i : g.indices) i += a.p();
        declared.push_back(std::move(g));
    }
    return GroupStructure(p, std::move(declared));
}

/// Symmetry prior: pairs every column of the first species' dictionary with
/// the species-swapped column of the second. Group names come from the first
/// dictionary's labels.
inline GroupStructure symmetry_groups(const Dictionary& dict_u, const Dictionary& dict_v,
                                      const std::string& species_u, const std::string& species_v) {
    require(dict_u.cols() == dict_v.cols(), errc::invalid_argument,
            "symmetry_groups: dictionaries must have equal width");
    std::vector<Group> declared;
    std::vector<char> used(dict_v.cols(), 0);
    for (std::size_t j = 0; j < dict_u.cols(); ++j) {
        const TermLabel image = swap_image(dict_u.labels[j], species_u, species_v);
        auto jv = dict_v.find_column(0, image);
        require(jv.has_value(), errc::invalid_argument,
                "symmetry_groups: no column " + image.str() + " in the second dictionary");
        require(!used[*jv], errc::invalid_argument,
                "symmetry_groups: column " + image.str() + " matched twice");
        used[*jv] = 1;
        declared.push_back({dict_u.labels[j].str(), {j, dict_u.cols() + *jv}});
    }
    return GroupStructure(dict_u.cols() + dict_v.cols(), std::move(declared));
}

}  // namespace groupsparse
