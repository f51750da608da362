#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tennis/attribution.hpp"
#include "tennis/error.hpp"
#include "tennis/rng.hpp"

using namespace tennis;

namespace {

TreeNode leaf(double value, double cover)
{
    TreeNode n;
    n.value = value;
    n.cover = cover;
    return n;
}

TreeNode split(int feature, double threshold, int left, int right, double cover)
{
    TreeNode n;
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    n.cover = cover;
    return n;
}

TreeEnsemble ensemble(std::vector<Tree> trees, std::size_t d, double lr = 1.0, double base = 0.0)
{
    TreeEnsemble m;
    m.trees = std::move(trees);
    m.learning_rate = lr;
    m.base_score = base;
    for (std::size_t j = 0; j < d; ++j) m.feature_names.push_back("f" + std::to_string(j));
    return m;
}

} // namespace

TEST(Attribution, SingleLeafHasNoAttribution)
{
    const auto model = ensemble({Tree{{leaf(2.0, 10.0)}}}, 3, 0.5, 1.0);
    const auto s = tree_shap(model, Matrix::from_rows({{1, 2, 3}}));
    EXPECT_DOUBLE_EQ(s.base_value, 2.0);
    for (double v : s.values.data()) EXPECT_EQ(v, 0.0);
}

TEST(Attribution, DepthOneClosedForm)
{
    // Left leaf 1 with cover 3, right leaf 5 with cover 1: expectation 2.
    const auto model = ensemble({Tree{{split(1, 0.5, 1, 2, 4.0), leaf(1.0, 3.0), leaf(5.0, 1.0)}}}, 2);
    const auto s = tree_shap(model, Matrix::from_rows({{9, 0}, {9, 1}}));
    EXPECT_DOUBLE_EQ(s.base_value, 2.0);
    EXPECT_DOUBLE_EQ(s.values(0, 1), -1.0);
    EXPECT_DOUBLE_EQ(s.values(1, 1), 3.0);
    EXPECT_EQ(s.values(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(expected_value(model), 2.0);
}

TEST(Attribution, MatchesSubsetEnumerationOnTrainedModels)
{
    Rng rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t d = 3 + static_cast<std::size_t>(trial % 3);
        Matrix x(60, d);
        std::vector<double> y(60);
        for (std::size_t i = 0; i < 60; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = std::floor(rng.uniform() * 5.0);
            y[i] = x(i, 0) * x(i, 1) - x(i, 2) + rng.uniform();
        }
        BoostParams p;
        p.n_rounds = 8;
        p.max_depth = 4;
        p.learning_rate = 0.3;
        const auto model = train(x, y, p);
        const auto s = tree_shap(model, x);
        for (std::size_t i = 0; i < 10; ++i) {
            const std::vector<double> row(x.row(i).begin(), x.row(i).end());
            const auto phi = oracle::shapley(model, row);
            double total = s.base_value;
            for (std::size_t j = 0; j < d; ++j) {
                EXPECT_NEAR(s.values(i, j), phi[j], 1e-9);
                total += s.values(i, j);
            }
            EXPECT_NEAR(total, predict_row(model, row), 1e-9);
        }
    }
}

TEST(Attribution, UnusedFeatureGetsZero)
{
    Rng rng(1);
    Matrix x(40, 3);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        x(i, 0) = rng.uniform();
        x(i, 1) = 7.0;
        x(i, 2) = rng.uniform();
        y[i] = 3.0 * x(i, 0) + x(i, 2);
    }
    BoostParams p;
    p.n_rounds = 10;
    const auto s = tree_shap(train(x, y, p), x);
    for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(s.values(i, 1), 0.0);
}

TEST(Attribution, ImportanceIsMeanAbsoluteValue)
{
    ShapMatrix s;
    s.values = Matrix::from_rows({{1, -1}, {3, 1}});
    s.feature_names = {"a", "b"};
    const auto r = importance(s);
    ASSERT_EQ(r.ranking.size(), 2u);
    EXPECT_EQ(r.ranking[0].first, "a");
    EXPECT_DOUBLE_EQ(r.ranking[0].second, 2.0);
    EXPECT_DOUBLE_EQ(r.ranking[1].second, 1.0);
    s.values = Matrix::from_rows({{1, -1}});
    EXPECT_EQ(importance(s).ranking[0].first, "a");
}

TEST(Attribution, DependencePairsReadFrameColumns)
{
    FeatureFrame f;
    f.names = {"a", "b"};
    f.rows = Matrix::from_rows({{1, 10}, {2, 20}});
    f.target = {0, 0};
    ShapMatrix s;
    s.values = Matrix::from_rows({{0.5, -0.5}, {0.25, 0.75}});
    s.feature_names = f.names;
    const auto pts = dependence_pairs(s, f, "b", "a");
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1].x, 20.0);
    EXPECT_EQ(pts[1].phi, 0.75);
    EXPECT_EQ(pts[1].color, 2.0);
    EXPECT_THROW(dependence_pairs(s, f, "c", "a"), Error);
}

TEST(Attribution, DefaultPairsNameKnownFeatures)
{
    const auto& names = feature_names();
    for (const auto& [f, c] : default_dependence_pairs()) {
        EXPECT_NE(std::find(names.begin(), names.end(), f), names.end()) << f;
        EXPECT_NE(std::find(names.begin(), names.end(), c), names.end()) << c;
    }
}

TEST(Attribution, MissingCoverIsRejected)
{
    const auto model = ensemble({Tree{{split(0, 0.5, 1, 2, 4.0), leaf(1.0, 0.0), leaf(5.0, 0.0)}}}, 1);
    try {
        tree_shap(model, Matrix::from_rows({{0}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingCover);
    }
}

TEST(Attribution, WrongWidthIsRejected)
{
    const auto model = ensemble({Tree{{leaf(1.0, 1.0)}}}, 2);
    try {
        tree_shap(model, Matrix::from_rows({{0, 1, 2}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DimensionMismatch);
    }
}
