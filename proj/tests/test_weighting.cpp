#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "tennis/error.hpp"
#include "tennis/rng.hpp"
#include "tennis/weighting.hpp"

using namespace tennis;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t m)
{
    Matrix x(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) x(i, j) = rng.uniform() * 10.0 - 3.0;
    }
    return x;
}

oracle::Rows rows_of(const Matrix& x)
{
    oracle::Rows r(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) r[i].assign(x.row(i).begin(), x.row(i).end());
    return r;
}

} // namespace

TEST(Weighting, ServeFactorWorkedExample)
{
    WeightVector w;
    w.raw_weights = {0.2, 0.8};
    w.adjusted = w.raw_weights;
    const auto a = apply_serve_factor(w, 0.1);
    EXPECT_NEAR(a.adjusted[0], 0.27272727272727, 1e-12);
    EXPECT_NEAR(a.adjusted[1], 0.72727272727273, 1e-12);
    EXPECT_DOUBLE_EQ(a.xi, 0.1);
}

TEST(Weighting, ZeroOffsetIsIdentity)
{
    WeightVector w;
    w.raw_weights = {0.3, 0.7};
    w.adjusted = w.raw_weights;
    const auto a = detail::apply_serve_offset(w, 0.0, 0);
    EXPECT_DOUBLE_EQ(a.adjusted[0], 0.3);
    EXPECT_DOUBLE_EQ(a.adjusted[1], 0.7);
}

TEST(Weighting, ServeFactorOutsideRangeIsRejected)
{
    WeightVector w;
    w.raw_weights = {0.5, 0.5};
    w.adjusted = w.raw_weights;
    for (double xi : {0.0, 0.04, 0.2, -0.1}) {
        try {
            apply_serve_factor(w, xi);
            FAIL() << xi;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::XiOutOfRange);
        }
    }
}

TEST(Weighting, MatchesStraightLineOracle)
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(11), m = 1 + rng.below(5);
        const Matrix x = random_matrix(rng, n, m);
        std::vector<Direction> dirs(m, Direction::Benefit);
        std::vector<bool> cost(m, false);
        for (std::size_t j = 0; j < m; ++j) {
            if (rng.bernoulli(0.3)) {
                dirs[j] = Direction::Cost;
                cost[j] = true;
            }
        }
        const auto w = apply_serve_factor(entropy_weights(normalize_minmax(x, dirs)), 0.1);
        const auto o = oracle::ewm(rows_of(x), cost, kDefaultEpsilon, 0.1);
        for (std::size_t j = 0; j < m; ++j) {
            EXPECT_NEAR(w.raw_entropy[j], o.entropy[j], 1e-9);
            EXPECT_NEAR(w.raw_weights[j], o.raw[j], 1e-9);
            EXPECT_NEAR(w.adjusted[j], o.adjusted[j], 1e-9);
        }
    }
}

TEST(Weighting, WeightsAreInvariantToRowOrder)
{
    Rng rng(3);
    const Matrix x = random_matrix(rng, 9, 4);
    std::vector<Direction> dirs(4, Direction::Benefit);
    const auto a = entropy_weights(normalize_minmax(x, dirs));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = x.rows(); i-- > 0;) rows.emplace_back(x.row(i).begin(), x.row(i).end());
    const auto b = entropy_weights(normalize_minmax(Matrix::from_rows(rows), dirs));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(a.raw_weights[j], b.raw_weights[j], 1e-12);
}

TEST(Weighting, ConstantColumnGetsZeroWeight)
{
    const Matrix x = Matrix::from_rows({{1, 5}, {2, 5}, {4, 5}});
    const std::vector<Direction> dirs(2, Direction::Benefit);
    const Matrix z = normalize_minmax(x, dirs);
    EXPECT_DOUBLE_EQ(z(0, 1), kDefaultEpsilon);
    const auto w = entropy_weights(z);
    EXPECT_EQ(w.raw_entropy[1], 1.0);
    EXPECT_EQ(w.raw_weights[1], 0.0);
    EXPECT_DOUBLE_EQ(w.raw_weights[0], 1.0);
}

TEST(Weighting, AllConstantColumnsFallBackToUniform)
{
    const Matrix x = Matrix::from_rows({{1, 5}, {1, 5}});
    const auto w = entropy_weights(normalize_minmax(x, std::vector<Direction>(2, Direction::Benefit)));
    EXPECT_TRUE(w.degenerate);
    EXPECT_DOUBLE_EQ(w.raw_weights[0], 0.5);
}

TEST(Weighting, SanityOnRandomMatrices)
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix x = random_matrix(rng, 3 + rng.below(30), 2 + rng.below(8));
        const auto w = apply_serve_factor(
            entropy_weights(normalize_minmax(x, std::vector<Direction>(x.cols(), Direction::Benefit))), 0.05);
        EXPECT_NEAR(std::accumulate(w.raw_weights.begin(), w.raw_weights.end(), 0.0), 1.0, 1e-9);
        EXPECT_NEAR(std::accumulate(w.adjusted.begin(), w.adjusted.end(), 0.0), 1.0, 1e-9);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            EXPECT_GE(w.raw_weights[j], 0.0);
            EXPECT_GE(w.raw_entropy[j], 0.0);
            EXPECT_LE(w.raw_entropy[j], 1.0);
        }
        EXPECT_GT(w.adjusted[0], w.raw_weights[0]);
    }
}

TEST(Weighting, SingleRowIsAnError)
{
    const Matrix x = Matrix::from_rows({{1, 2}});
    try {
        entropy_weights(normalize_minmax(x, std::vector<Direction>(2, Direction::Benefit)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyMatrix);
    }
}

TEST(Weighting, ScalerReappliesFittedRange)
{
    const Matrix x = Matrix::from_rows({{0, 10}, {4, 0}});
    const std::vector<Direction> dirs = {Direction::Benefit, Direction::Cost};
    const auto s = MinMaxScaler::fit(x, dirs);
    EXPECT_DOUBLE_EQ(s.apply(0, 2.0), 0.5 + kDefaultEpsilon);
    EXPECT_DOUBLE_EQ(s.apply(1, 10.0), kDefaultEpsilon);
    EXPECT_EQ(s.transform(x), normalize_minmax(x, dirs));
}
