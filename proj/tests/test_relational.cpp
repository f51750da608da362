#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tennis/error.hpp"
#include "tennis/relational.hpp"
#include "tennis/rng.hpp"

using namespace tennis;

namespace {

IndicatorMatrix matrix_of(const std::vector<std::vector<double>>& rows)
{
    IndicatorMatrix m;
    m.rows = Matrix::from_rows(rows);
    for (std::size_t j = 0; j < m.rows.cols(); ++j) m.ids.push_back(static_cast<IndicatorId>(j + 1));
    for (std::size_t t = 0; t < rows.size(); ++t) m.point_index.push_back(static_cast<int>(t + 1));
    m.reference.assign(rows.size(), 1.0);
    return m;
}

} // namespace

TEST(Relational, ProportionalSequenceHasUnitCoefficients)
{
    const std::vector<double> ref = {1, 2, 3, 4};
    const Matrix x = Matrix::from_rows({{2}, {4}, {6}, {8}});
    const auto g = grey_relation(ref, x, std::vector<double>{1.0});
    EXPECT_TRUE(g.degenerate);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(g.coefficients(k, 0), 1.0);
    EXPECT_DOUBLE_EQ(g.degrees[0], 1.0);
}

TEST(Relational, ReversedSequenceMatchesOracle)
{
    const std::vector<double> ref = {1, 2, 3};
    const Matrix x = Matrix::from_rows({{3}, {2}, {1}});
    const auto g = grey_relation(ref, x, std::vector<double>{1.0}, 0.5);
    const auto o = oracle::gra(ref, {{3}, {2}, {1}}, {1.0}, 0.5);
    EXPECT_NEAR(g.ma, o.ma, 1e-12);
    EXPECT_NEAR(g.mi, o.mi, 1e-12);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(g.delta(k, 0), o.delta[k][0], 1e-12);
        EXPECT_NEAR(g.coefficients(k, 0), o.gamma[k][0], 1e-12);
    }
    // Means are 2, so the scaled sequences are [.5,1,1.5] and [1.5,1,.5].
    EXPECT_DOUBLE_EQ(g.ma, 1.0);
    EXPECT_DOUBLE_EQ(g.mi, 0.0);
    EXPECT_NEAR(g.coefficients(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(g.coefficients(1, 0), 1.0);
}

TEST(Relational, RandomMatricesMatchOracle)
{
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(11), m = 1 + rng.below(5);
        oracle::Rows rows(n, std::vector<double>(m));
        std::vector<double> ref(n);
        for (std::size_t i = 0; i < n; ++i) {
            ref[i] = 0.1 + rng.uniform();
            for (auto& v : rows[i]) v = 0.1 + rng.uniform();
        }
        std::vector<double> w(m);
        double total = 0.0;
        for (auto& v : w) total += (v = rng.uniform() + 0.01);
        for (auto& v : w) v /= total;
        const double rho = 0.1 + 0.8 * rng.uniform();
        const auto g = grey_relation(ref, Matrix::from_rows(rows), w, rho);
        const auto o = oracle::gra(ref, rows, w, rho);
        EXPECT_NEAR(g.ma, o.ma, 1e-9);
        EXPECT_NEAR(g.mi, o.mi, 1e-9);
        for (std::size_t j = 0; j < m; ++j) {
            EXPECT_NEAR(g.degrees[j], o.degree[j], 1e-9);
            for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(g.coefficients(i, j), o.gamma[i][j], 1e-9);
        }
    }
}

TEST(Relational, ScalingAColumnLeavesItsCoefficientsUnchanged)
{
    const std::vector<double> ref = {1, 3, 2, 5};
    const Matrix a = Matrix::from_rows({{1, 2}, {2, 1}, {4, 3}, {3, 3}});
    Matrix b = a;
    for (std::size_t i = 0; i < 4; ++i) b(i, 1) *= 7.5;
    const std::vector<double> w = {0.5, 0.5};
    const auto ga = grey_relation(ref, a, w);
    const auto gb = grey_relation(ref, b, w);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ga.coefficients(i, 1), gb.coefficients(i, 1), 1e-12);
}

TEST(Relational, CoefficientsLieInUnitInterval)
{
    Rng rng(8);
    Matrix x(20, 3);
    std::vector<double> ref(20);
    for (std::size_t i = 0; i < 20; ++i) {
        ref[i] = 1.0 + rng.uniform();
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = 1.0 + rng.uniform();
    }
    const auto g = grey_relation(ref, x, std::vector<double>{0.2, 0.3, 0.5});
    EXPECT_LE(g.mi, g.ma);
    for (double v : g.coefficients.data()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    for (double d : g.degrees) {
        EXPECT_GT(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(Relational, ZeroMeanColumnIsRejected)
{
    const Matrix x = Matrix::from_rows({{1, 1}, {-1, 2}});
    try {
        grey_relation(std::vector<double>{1, 2}, x, std::vector<double>{0.5, 0.5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ZeroMeanColumn);
    }
}

TEST(Relational, LayoutMismatchIsRejected)
{
    const Matrix x = Matrix::from_rows({{1, 1}, {2, 2}});
    try {
        grey_relation(std::vector<double>{1, 2, 3}, x, std::vector<double>{0.5, 0.5});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LayoutMismatch);
    }
}

TEST(Relational, ConstantMatrixGivesConstantScore)
{
    const auto m = matrix_of(std::vector<std::vector<double>>(6, {0.4, 0.4}));
    const auto s = performance_score(m, std::vector<double>{0.3, 0.5}, 3);
    for (double v : s.scores) EXPECT_NEAR(v, 0.4 * 0.8, 1e-15);
}

TEST(Relational, WindowOfOneIsPlainDotProduct)
{
    const auto m = matrix_of({{0.1, 0.9}, {0.5, 0.2}, {0.7, 0.3}});
    const std::vector<double> deg = {0.25, 0.75};
    const auto s = performance_score(m, deg, 1);
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(s.scores[t], 0.25 * m.rows(t, 0) + 0.75 * m.rows(t, 1));
}

TEST(Relational, TwelvePointWindowedMean)
{
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 12; ++t) rows.push_back({0.05 * t, 1.0 - 0.07 * t, (t % 3) * 0.3});
    const auto m = matrix_of(rows);
    const std::vector<double> deg = {0.2, 0.3, 0.4};
    const auto s = performance_score(m, deg, 10);
    // Point 11 averages rows 2..11 (indices 1..10).
    double expected = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t i = 1; i <= 10; ++i) mean += rows[i][j];
        expected += deg[j] * mean / 10.0;
    }
    EXPECT_NEAR(s.scores[10], expected, 1e-12);
    // Partial window at the start: point 3 averages rows 1..3.
    double partial = 0.0;
    for (std::size_t j = 0; j < 3; ++j) partial += deg[j] * (rows[0][j] + rows[1][j] + rows[2][j]) / 3.0;
    EXPECT_NEAR(s.scores[2], partial, 1e-12);
}

TEST(Relational, ScoreIsBoundedByWindowMeans)
{
    Rng rng(4);
    std::vector<std::vector<double>> rows(30, std::vector<double>(4));
    for (auto& r : rows) {
        for (auto& v : r) v = rng.uniform();
    }
    const std::vector<double> deg = {0.1, 0.2, 0.3, 0.15};
    const auto s = performance_score(matrix_of(rows), deg, 10);
    for (double v : s.scores) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 0.75 + 1e-12);
    }
}

TEST(Relational, ScoreLayoutMismatchIsRejected)
{
    try {
        performance_score(matrix_of({{0.1, 0.2}}), std::vector<double>{1.0}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LayoutMismatch);
    }
}
