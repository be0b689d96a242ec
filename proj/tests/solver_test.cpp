#include <gtest/gtest.h>

#include <cmath>

#include "groupsparse/rng.hpp"
#include "groupsparse/solver.hpp"

using namespace groupsparse;

namespace {

RegressionProblem make_problem(DenseMatrix theta, Vector target, GroupStructure gs,
                               std::vector<TermLabel> labels = {}) {
    RegressionProblem p;
    if (labels.empty())
        for (std::size_t j = 0; j < theta.cols; ++j)
            labels.push_back(TermLabel::variable("t" + std::to_string(j + 1)));
    p.dict.matrix = std::move(theta);
    p.dict.labels = std::move(labels);
    p.dict.blocks = {{"", 0, p.dict.matrix.rows, 0, p.dict.matrix.cols}};
    p.dict.block_of_col.assign(p.dict.matrix.cols, 0);
    p.target = std::move(target);
    p.groups = std::move(gs);
    return p;
}

// Random partition of {0..p-1} into at most max_groups groups.
GroupStructure random_groups(std::size_t p, std::size_t max_groups, Rng& rng) {
    std::size_t m = 1 + rng.next_below(max_groups);
    std::vector<Group> gs(m);
    for (std::size_t g = 0; g < m; ++g) gs[g].name = "g" + std::to_string(g + 1);
    for (std::size_t j = 0; j < p; ++j) gs[rng.next_below(m)].indices.push_back(j);
    std::vector<Group> nonempty;
    for (auto& g : gs)
        if (!g.indices.empty()) nonempty.push_back(std::move(g));
    return GroupStructure(p, std::move(nonempty));
}

// Independent keep-or-zero oracle: per group, enumerate the two candidate
// restrictions (zero, or the gradient iterate itself) of the separable
// per-group objective ||xi_g - v_g||^2 + lambda*sqrt(p_g)*1(xi_g != 0) and
// pick the cheaper one; ties keep the group.
bool oracle_keeps(const Vector& v, const Group& g, double lambda) {
    double cost_zero = 0.0;
    for (std::size_t idx : g.indices) cost_zero += v[idx] * v[idx];
    double cost_keep = lambda * std::sqrt(static_cast<double>(g.size()));
    return cost_keep <= cost_zero;
}

}  // namespace

TEST(GroupHardThreshold, ZeroVectorStaysZero) {
    GroupStructure gs(3, {{"a", {0, 1}}, {"b", {2}}});
    auto out = group_hard_threshold(Vector(3, 0.0), gs, 0.5);
    EXPECT_EQ(out, Vector(3, 0.0));
}

TEST(GroupHardThreshold, SingletonHandCase) {
    // threshold sqrt(0.04 * 1) = 0.2 <= 0.3 -> kept
    GroupStructure gs(1, {{"a", {0}}});
    auto out = group_hard_threshold({0.3}, gs, 0.04);
    EXPECT_DOUBLE_EQ(out[0], 0.3);
}

TEST(GroupHardThreshold, SizeFourHandCase) {
    // threshold sqrt(2 * sqrt(4)) = 2; ||v_g|| = 1.9 -> zeroed
    GroupStructure gs(4, {{"a", {0, 1, 2, 3}}});
    Vector v(4, 0.95);
    ASSERT_NEAR(norm2(v), 1.9, 1e-12);
    auto out = group_hard_threshold(v, gs, 2.0);
    EXPECT_EQ(out, Vector(4, 0.0));
}

TEST(GroupHardThreshold, BoundaryTieKeepsGroup) {
    GroupStructure gs(1, {{"a", {0}}});
    // ||v|| = 0.2 exactly equals sqrt(lambda) for lambda = 0.04.
    auto out = group_hard_threshold({0.2}, gs, 0.04);
    EXPECT_DOUBLE_EQ(out[0], 0.2);
}

TEST(GroupHardThreshold, Idempotent) {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t p = 2 + rng.next_below(7);
        auto gs = random_groups(p, 4, rng);
        Vector v(p);
        for (auto& x : v) x = rng.next_gaussian();
        double lambda = rng.next_double();
        auto once = group_hard_threshold(v, gs, lambda);
        auto twice = group_hard_threshold(once, gs, lambda);
        EXPECT_EQ(once, twice);
    }
}

TEST(GroupHardThreshold, SurvivorsShrinkWithLambda) {
    Rng rng(29);
    for (int rep = 0; rep < 200; ++rep) {
        std::size_t p = 2 + rng.next_below(7);
        auto gs = random_groups(p, 4, rng);
        Vector v(p);
        for (auto& x : v) x = rng.next_gaussian();
        double l1 = rng.next_double();
        double l2 = l1 + rng.next_double();
        auto out1 = group_hard_threshold(v, gs, l1);
        auto out2 = group_hard_threshold(v, gs, l2);
        for (std::size_t j = 0; j < p; ++j)
            if (out2[j] != 0.0) EXPECT_NE(out1[j], 0.0);
    }
}

TEST(GroupHardThreshold, SingletonsReduceToElementwiseHardThreshold) {
    Rng rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t p = 1 + rng.next_below(8);
        auto gs = GroupStructure::singletons(p);
        Vector v(p);
        for (auto& x : v) x = rng.next_gaussian();
        double lambda = rng.next_double();
        auto out = group_hard_threshold(v, gs, lambda);
        const double thr = std::sqrt(lambda);
        for (std::size_t j = 0; j < p; ++j) {
            if (std::abs(v[j]) >= thr)
                EXPECT_EQ(out[j], v[j]);
            else
                EXPECT_EQ(out[j], 0.0);
        }
    }
}

TEST(GroupHardThreshold, MatchesBruteForceOracle) {
    Rng rng(997);
    for (int rep = 0; rep < 1000; ++rep) {
        std::size_t p = 1 + rng.next_below(8);
        auto gs = random_groups(p, 4, rng);
        Vector v(p);
        for (auto& x : v) x = 2.0 * rng.next_gaussian();
        double lambda = 2.0 * rng.next_double();
        auto out = group_hard_threshold(v, gs, lambda);
        for (const auto& g : gs.groups()) {
            bool kept = out[g.indices[0]] != 0.0 || v[g.indices[0]] == 0.0;
            bool kept_any = false;
            for (std::size_t idx : g.indices)
                if (out[idx] != 0.0) kept_any = true;
            bool all_zero_input = true;
            for (std::size_t idx : g.indices)
                if (v[idx] != 0.0) all_zero_input = false;
            (void)kept;
            if (all_zero_input) continue;  // zero group: kept/zero indistinguishable
            EXPECT_EQ(kept_any, oracle_keeps(v, g, lambda));
        }
    }
}

TEST(GihtSolve, LambdaAboveLambdaMaxGivesEmptyModel) {
    auto prob = make_problem(DenseMatrix::identity(4), {1.0, -2.0, 0.5, 0.0},
                             GroupStructure::singletons(4));
    SolverOptions opts;
    opts.lambda = lambda_max(prob) * 1.01;
    auto est = giht_solve(prob, opts);
    EXPECT_TRUE(est.support_columns.empty());
    EXPECT_EQ(est.coefficients, Vector(4, 0.0));
    EXPECT_TRUE(est.converged);
    EXPECT_NEAR(est.residual_norm, norm2({1.0, -2.0, 0.5, 0.0}), 1e-12);
}

TEST(GihtSolve, OrthonormalExactRecovery) {
    // Orthonormal dictionary from the QR of a random matrix; the target is a
    // noise-free combination of two known columns.
    Rng rng(41);
    const std::size_t n = 12, p = 6;
    DenseMatrix raw(n, p);
    for (auto& v : raw.data) v = rng.next_gaussian();
    // Gram-Schmidt for the test's own orthonormal basis.
    DenseMatrix q = raw;
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double pr = 0.0;
            for (std::size_t i = 0; i < n; ++i) pr += q(i, j) * q(i, k);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= pr * q(i, k);
        }
        double nn = 0.0;
        for (std::size_t i = 0; i < n; ++i) nn += q(i, j) * q(i, j);
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nn;
    }
    Vector target(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) target[i] = 2.0 * q(i, 1) - 1.5 * q(i, 4);
    auto prob = make_problem(q, target, GroupStructure::singletons(p));
    SolverOptions opts;
    opts.lambda = 1.0;  // between 1.5^2 = 2.25 and the zero correlations
    auto est = giht_solve(prob, opts);
    EXPECT_EQ(est.support_columns, (std::vector<std::size_t>{1, 4}));
    EXPECT_NEAR(est.coefficients[1], 2.0, 1e-10);
    EXPECT_NEAR(est.coefficients[4], -1.5, 1e-10);
    EXPECT_TRUE(est.converged);
    EXPECT_NEAR(est.residual_norm, 0.0, 1e-10);
}

TEST(Debias, IdentityDictionaryReturnsTarget) {
    auto prob = make_problem(DenseMatrix::identity(3), {1.0, 2.0, 3.0},
                             GroupStructure::singletons(3));
    auto coef = debias(prob, {0, 1, 2});
    EXPECT_NEAR(coef[0], 1.0, 1e-14);
    EXPECT_NEAR(coef[1], 2.0, 1e-14);
    EXPECT_NEAR(coef[2], 3.0, 1e-14);
}

TEST(Debias, EmptySupportIsZeroNotError) {
    auto prob = make_problem(DenseMatrix::identity(3), {1.0, 2.0, 3.0},
                             GroupStructure::singletons(3));
    auto coef = debias(prob, {});
    EXPECT_EQ(coef, Vector(3, 0.0));
}

TEST(Debias, TrueSupportRecoversGeneratingCoefficients) {
    Rng rng(53);
    const std::size_t n = 20, p = 7;
    DenseMatrix theta(n, p);
    for (auto& v : theta.data) v = rng.next_gaussian();
    Vector truth(p, 0.0);
    truth[2] = 1.3;
    truth[5] = -0.7;
    Vector target = matvec(theta, truth);
    auto prob = make_problem(theta, target, GroupStructure::singletons(p));
    auto coef = debias(prob, {2, 5});
    EXPECT_NEAR(coef[2], 1.3, 1e-10);
    EXPECT_NEAR(coef[5], -0.7, 1e-10);
    for (std::size_t j : {0u, 1u, 3u, 4u, 6u}) EXPECT_EQ(coef[j], 0.0);
}

TEST(LambdaMax, ZeroTargetGivesZero) {
    auto prob = make_problem(DenseMatrix::identity(3), Vector(3, 0.0),
                             GroupStructure::singletons(3));
    EXPECT_EQ(lambda_max(prob), 0.0);
}

TEST(LambdaMax, UnitColumnFormula) {
    // Single unit column: mu = 1 and lambda_max = (Theta^T U)^2.
    DenseMatrix a(3, 1);
    a(0, 0) = 1.0;
    Vector target = {0.8, 0.0, 0.0};
    auto prob = make_problem(a, target, GroupStructure::singletons(1));
    SolverOptions opts;
    opts.normalize = false;
    EXPECT_NEAR(lambda_max(prob, opts), 0.64, 1e-12);
}

TEST(LambdaMax, QuadraticInTargetScale) {
    Rng rng(61);
    DenseMatrix theta(10, 4);
    for (auto& v : theta.data) v = rng.next_gaussian();
    Vector target(10);
    for (auto& v : target) v = rng.next_gaussian();
    auto prob1 = make_problem(theta, target, GroupStructure::singletons(4));
    Vector target2 = target;
    for (auto& v : target2) v *= 2.0;
    auto prob2 = make_problem(theta, target2, GroupStructure::singletons(4));
    EXPECT_NEAR(lambda_max(prob2), 4.0 * lambda_max(prob1), 1e-9 * lambda_max(prob2));
}

TEST(GihtSolve, DebiasNeverWorsensResidualOnSameSupport) {
    Rng rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 15, p = 6;
        DenseMatrix theta(n, p);
        for (auto& v : theta.data) v = rng.next_gaussian();
        Vector target(n);
        for (auto& v : target) v = rng.next_gaussian();
        auto prob = make_problem(theta, target, GroupStructure::singletons(p));
        auto nc = normalize_columns(theta);
        Vector v0 = matvec_transposed(nc.matrix, target);
        double mu = 1.0 / spectral_norm_sq(nc.matrix, 1e-8, 5000);
        for (auto& x : v0) x *= mu;
        double lambda = 0.5 * lambda_max(prob);
        auto thresholded = group_hard_threshold(v0, prob.groups, lambda);
        std::vector<std::size_t> support;
        for (std::size_t j = 0; j < p; ++j)
            if (thresholded[j] != 0.0) support.push_back(j);
        if (support.empty()) continue;
        // Pre-de-biasing residual with the raw thresholded iterate.
        Vector fit(n, 0.0);
        for (std::size_t j : support)
            for (std::size_t i = 0; i < n; ++i) fit[i] += nc.matrix(i, j) * thresholded[j];
        double pre = 0.0;
        for (std::size_t i = 0; i < n; ++i) pre += (target[i] - fit[i]) * (target[i] - fit[i]);
        // De-biased residual on the same support.
        RegressionProblem nprob = prob;
        nprob.dict.matrix = nc.matrix;
        auto coef = debias(nprob, support);
        Vector fit2 = matvec(nprob.dict.matrix, coef);
        double post = 0.0;
        for (std::size_t i = 0; i < n; ++i) post += (target[i] - fit2[i]) * (target[i] - fit2[i]);
        EXPECT_LE(post, pre * (1.0 + 1e-12));
    }
}

TEST(GihtSolve, ScaleConsistentSupport) {
    Rng rng(83);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 25, p = 8;
        DenseMatrix theta(n, p);
        for (auto& v : theta.data) v = rng.next_gaussian();
        // Wildly different column scales.
        for (std::size_t j = 0; j < p; ++j) {
            double s = std::pow(10.0, static_cast<double>(j % 5) - 2.0);
            for (std::size_t i = 0; i < n; ++i) theta(i, j) *= s;
        }
        Vector truth(p, 0.0);
        truth[1] = 2.0 / std::pow(10.0, -1.0);
        truth[6] = -1.0 / std::pow(10.0, 1.0);
        Vector target = matvec(theta, truth);
        for (auto& v : target) v += 0.01 * rng.next_gaussian();
        auto gs = GroupStructure::singletons(p);
        auto prob = make_problem(theta, target, gs);

        SolverOptions with_norm;
        with_norm.lambda = 0.3 * lambda_max(prob);
        auto est1 = giht_solve(prob, with_norm);

        auto nc = normalize_columns(theta);
        auto prob2 = make_problem(nc.matrix, target, gs);
        SolverOptions no_norm = with_norm;
        no_norm.normalize = false;
        auto est2 = giht_solve(prob2, no_norm);
        EXPECT_EQ(est1.support_columns, est2.support_columns);
        // De-normalized coefficients agree with the pre-normalized fit.
        for (std::size_t j : est1.support_columns)
            EXPECT_NEAR(est1.coefficients[j] * nc.scales[j], est2.coefficients[j],
                        1e-8 * std::max(1.0, std::abs(est2.coefficients[j])));
    }
}

TEST(GihtSolve, DeterministicAcrossRuns) {
    Rng rng(97);
    DenseMatrix theta(30, 10);
    for (auto& v : theta.data) v = rng.next_gaussian();
    Vector target(30);
    for (auto& v : target) v = rng.next_gaussian();
    auto prob = make_problem(theta, target, GroupStructure::singletons(10));
    SolverOptions opts;
    opts.lambda = 0.4 * lambda_max(prob);
    auto a = giht_solve(prob, opts);
    auto b = giht_solve(prob, opts);
    EXPECT_EQ(a.support_columns, b.support_columns);
    EXPECT_EQ(a.coefficients, b.coefficients);
    EXPECT_EQ(a.iterations_used, b.iterations_used);
}

TEST(GihtSolve, GroupedSelectionEntersJointly) {
    // Two tied columns where only their joint energy clears the threshold.
    Rng rng(103);
    const std::size_t n = 40;
    DenseMatrix theta(n, 4);
    for (auto& v : theta.data) v = rng.next_gaussian();
    Vector truth = {0.8, 0.8, 0.0, 0.0};
    Vector target = matvec(theta, truth);
    GroupStructure tied(4, {{"pair", {0, 1}}});
    auto prob = make_problem(theta, target, tied);
    SolverOptions opts;
    opts.lambda = 0.5 * lambda_max(prob);
    auto est = giht_solve(prob, opts);
    ASSERT_TRUE(est.selected("pair"));
    // Both columns of the group carry coefficients.
    EXPECT_NE(est.coefficients[0], 0.0);
    EXPECT_NE(est.coefficients[1], 0.0);
}
