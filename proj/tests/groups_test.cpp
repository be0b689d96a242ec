#include <gtest/gtest.h>

#include "groupsparse/groups.hpp"

using namespace groupsparse;

namespace {

// Minimal composite dictionary: `widths` columns per block, labels t1..tw.
Dictionary toy_composite(const std::vector<std::string>& block_names, std::size_t width) {
    std::vector<Dictionary> blocks;
    std::vector<Vector> targets;
    for (const auto& name : block_names) {
        std::vector<std::pair<std::string, Vector>> states;
        for (std::size_t j = 0; j < width; ++j)
            states.push_back({"t" + std::to_string(j + 1), {1.0, 2.0}});
        auto d = monomial_features(states, 1);
        d.blocks.front().name = name;
        blocks.push_back(std::move(d));
        targets.push_back({0.0, 0.0});
    }
    return stack_blocks(blocks, targets).first;
}

}  // namespace

TEST(GroupStructure, SingletonCompletionCoversAllColumns) {
    GroupStructure gs(5, {{"a", {0, 2}}});
    EXPECT_EQ(gs.group_count(), 4u);  // a + 3 singletons
    std::size_t total = 0;
    for (const auto& g : gs.groups()) total += g.size();
    EXPECT_EQ(total, 5u);
}

TEST(GroupStructure, OverlapRejected) {
    EXPECT_THROW(GroupStructure(3, {{"a", {0, 1}}, {"b", {1, 2}}}), Error);
}

TEST(GroupStructure, JsonRoundTrip) {
    GroupStructure gs(4, {{"pair", {1, 3}}});
    auto j = gs.to_json();
    EXPECT_EQ(j["p"], 4);
    // Serialized indices are 1-based and sorted.
    EXPECT_EQ(j["groups"][0]["indices"], (nlohmann::json{2, 4}));
    auto back = GroupStructure::from_json(j);
    EXPECT_EQ(back.p(), gs.p());
    EXPECT_EQ(back.group_count(), gs.group_count());
    ASSERT_TRUE(back.find("pair"));
    EXPECT_EQ(back.group(*back.find("pair")).indices, (std::vector<std::size_t>{1, 3}));
}

TEST(ValidateGroups, ReportsOverlapByColumn) {
    auto v = validate_groups(3, {{"a", {0, 1}}, {"b", {1, 2}}});
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].what.find("column 2"), std::string::npos);
}

TEST(ValidateGroups, ValidPartitionOk) {
    EXPECT_TRUE(validate_groups(3, {{"a", {0, 1}}, {"b", {2}}}, true).empty());
}

TEST(ValidateGroups, GapStrictVsCompletion) {
    std::vector<Group> gaps = {{"a", {0}}, {"b", {2}}};
    auto strict = validate_groups(3, gaps, true);
    ASSERT_EQ(strict.size(), 1u);
    EXPECT_NE(strict[0].what.find("column 2"), std::string::npos);
    EXPECT_TRUE(validate_groups(3, gaps, false).empty());
    GroupStructure completed(3, gaps);
    EXPECT_EQ(completed.group_count(), 3u);
}

TEST(ConservationGroups, TiesTermAcrossBlocks) {
    auto dict = toy_composite({"b1", "b2"}, 3);
    ConservationPair pair{"g1", TermLabel::variable("t1"), "b1", "b2"};
    auto gs = conservation_groups(dict, {pair});
    ASSERT_TRUE(gs.find("g1"));
    const auto& g = gs.group(*gs.find("g1"));
    EXPECT_EQ(g.indices, (std::vector<std::size_t>{0, 3}));
    EXPECT_EQ(gs.group_count(), 1u + 4u);  // one pair + four singletons
}

TEST(ConservationGroups, EmptyPairListAllSingletons) {
    auto dict = toy_composite({"b1", "b2"}, 2);
    auto gs = conservation_groups(dict, {});
    EXPECT_EQ(gs.group_count(), 4u);
    for (const auto& g : gs.groups()) EXPECT_EQ(g.size(), 1u);
}

TEST(ConservationGroups, MissingTermRejected) {
    auto dict = toy_composite({"b1", "b2"}, 2);
    ConservationPair pair{"g1", TermLabel::variable("nope"), "b1", "b2"};
    EXPECT_THROW(conservation_groups(dict, {pair}), Error);
}

TEST(SpatialGroups, FormulaExamples) {
    auto gs = spatial_groups(3, 2);
    ASSERT_EQ(gs.group_count(), 3u);
    EXPECT_EQ(gs.group(0).indices, (std::vector<std::size_t>{0, 3}));
    EXPECT_EQ(gs.group(1).indices, (std::vector<std::size_t>{1, 4}));
    EXPECT_EQ(gs.group(2).indices, (std::vector<std::size_t>{2, 5}));
}

TEST(SpatialGroups, DegenerateSingleGroup) {
    auto gs = spatial_groups(1, 1);
    EXPECT_EQ(gs.group_count(), 1u);
    EXPECT_EQ(gs.group(0).indices, (std::vector<std::size_t>{0}));
}

TEST(SpatialGroups, PaperScaleCounts) {
    auto gs = spatial_groups(15, 10);
    EXPECT_EQ(gs.p(), 150u);
    EXPECT_EQ(gs.group_count(), 15u);
    for (const auto& g : gs.groups()) EXPECT_EQ(g.size(), 10u);
}

TEST(SpatialGroups, ConsistentWithBlockStacking) {
    // Column (block k, local l) must land in group l.
    const std::size_t p = 4, pg = 3;
    auto gs = spatial_groups(p, pg);
    for (std::size_t k = 0; k < pg; ++k)
        for (std::size_t l = 0; l < p; ++l) EXPECT_EQ(gs.group_of(l + k * p), l);
}

TEST(UnionGroups, MergesPairedGroups) {
    auto a = spatial_groups(2, 10);  // groups of size 10 over 20 columns
    auto b = spatial_groups(2, 10);
    auto merged = union_groups(a, b, {{"g1", "g1"}, {"g2", "g2"}});
    EXPECT_EQ(merged.p(), 40u);
    EXPECT_EQ(merged.group_count(), 2u);
    for (const auto& g : merged.groups()) EXPECT_EQ(g.size(), 20u);
}

TEST(UnionGroups, EmptyPairingConcatenates) {
    auto a = spatial_groups(2, 2);
    auto b = spatial_groups(3, 2);
    auto merged = union_groups(a, b, {});
    EXPECT_EQ(merged.p(), 10u);
    EXPECT_EQ(merged.group_count(), 5u);
    // b's indices are offset past a's column range.
    for (std::size_t g = 2; g < 5; ++g)
        for (std::size_t idx : merged.group(g).indices) EXPECT_GE(idx, 4u);
}

TEST(UnionGroups, AdvectionDiffusionScale) {
    std::vector<std::pair<std::string, std::string>> pairing;
    for (std::size_t l = 1; l <= 15; ++l)
        pairing.push_back({"g" + std::to_string(l), "g" + std::to_string(l)});
    auto merged = union_groups(spatial_groups(15, 10), spatial_groups(15, 10), pairing);
    EXPECT_EQ(merged.p(), 300u);
    EXPECT_EQ(merged.group_count(), 15u);
    for (const auto& g : merged.groups()) EXPECT_EQ(g.size(), 20u);
}

TEST(SymmetryGroups, PairsSwappedColumns) {
    std::vector<TermLabel> roster = {
        TermLabel::variable("u"), TermLabel::variable("v"), TermLabel::variable("u", 3),
        TermLabel::variable("v", 3), TermLabel::variable("u") * TermLabel::variable("v")};
    ValueTable table;
    table[{"u", {}}] = {1.0, 2.0};
    table[{"v", {}}] = {3.0, 4.0};
    auto du = build_dictionary(roster, table, 2, "u");
    auto dv = build_dictionary(roster, table, 2, "v");
    auto gs = symmetry_groups(du, dv, "u", "v");
    EXPECT_EQ(gs.p(), 10u);
    EXPECT_EQ(gs.group_count(), 5u);
    // u^3 pairs with v^3 in the other block.
    auto g = gs.find("u^3");
    ASSERT_TRUE(g);
    EXPECT_EQ(gs.group(*g).indices, (std::vector<std::size_t>{2, 5 + 3}));
    // The symmetric label u*v pairs with itself across blocks, still size 2.
    auto guv = gs.find("u*v");
    ASSERT_TRUE(guv);
    EXPECT_EQ(gs.group(*guv).size(), 2u);
    EXPECT_EQ(gs.group(*guv).indices, (std::vector<std::size_t>{4, 5 + 4}));
}

TEST(SymmetryGroups, SizesAtPaperScale) {
    // 18 labels per species block -> 18 groups of size 2 over 36 columns.
    std::vector<TermLabel> roster;
    roster.push_back(TermLabel::constant());
    for (int du = 0; du <= 3; ++du)
        for (int dv = 0; dv + du <= 3; ++dv) {
            if (du + dv == 0) continue;
            TermLabel l;
            if (du > 0) l = l * TermLabel::variable("u", du);
            if (dv > 0) l = l * TermLabel::variable("v", dv);
            roster.push_back(l);
        }
    for (const auto& var : {"u", "v"})
        for (auto axes : {std::vector<int>{1, 0}, std::vector<int>{0, 1}, std::vector<int>{2, 0},
                          std::vector<int>{0, 2}})
            roster.push_back(TermLabel::derivative(var, axes));
    ASSERT_EQ(roster.size(), 18u);
    ValueTable table;
    table[{"u", {}}] = {1.0};
    table[{"v", {}}] = {2.0};
    for (const auto& var : {"u", "v"})
        for (auto axes : {std::vector<int>{1, 0}, std::vector<int>{0, 1}, std::vector<int>{2, 0},
                          std::vector<int>{0, 2}})
            table[{var, axes}] = {0.5};
    auto du = build_dictionary(roster, table, 1, "u");
    auto dv = build_dictionary(roster, table, 1, "v");
    auto gs = symmetry_groups(du, dv, "u", "v");
    EXPECT_EQ(gs.p(), 36u);
    EXPECT_EQ(gs.group_count(), 18u);
    for (const auto& g : gs.groups()) EXPECT_EQ(g.size(), 2u);
}

TEST(SymmetryGroups, InvariantUnderArgumentExchange) {
    std::vector<TermLabel> roster = {TermLabel::variable("u"), TermLabel::variable("v")};
    ValueTable table;
    table[{"u", {}}] = {1.0};
    table[{"v", {}}] = {2.0};
    auto du = build_dictionary(roster, table, 1, "u");
    auto dv = build_dictionary(roster, table, 1, "v");
    auto g1 = symmetry_groups(du, dv, "u", "v");
    auto g2 = symmetry_groups(dv, du, "v", "u");
    ASSERT_EQ(g1.group_count(), g2.group_count());
    // Same partition up to renaming: compare the induced column pairings.
    std::set<std::pair<std::size_t, std::size_t>> p1, p2;
    auto key = [](const Group& g, std::size_t p, bool flip) {
        std::size_t a = g.indices[0], b = g.indices[1];
        if (flip) {
            // Map second-dictionary-first indexing back to u-first indexing.
            a = a < p / 2 ? a + p / 2 : a - p / 2;
            b = b < p / 2 ? b + p / 2 : b - p / 2;
        }
        return std::make_pair(std::min(a, b), std::max(a, b));
    };
    for (const auto& g : g1.groups()) p1.insert(key(g, g1.p(), false));
    for (const auto& g : g2.groups()) p2.insert(key(g, g2.p(), true));
    EXPECT_EQ(p1, p2);
}

TEST(GroupStructure, SizesSumToP) {
    auto gs = spatial_groups(7, 3);
    std::size_t total = 0;
    for (const auto& g : gs.groups()) total += g.size();
    EXPECT_EQ(total, gs.p());
    GroupStructure with_singletons(10, {{"a", {0, 5}}, {"b", {2, 7, 9}}});
    total = 0;
    for (const auto& g : with_singletons.groups()) total += g.size();
    EXPECT_EQ(total, 10u);
}
