#include "tennis/relational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tennis/error.hpp"

namespace tennis {

namespace {

std::vector<double> mean_scaled(std::span<const double> values, const std::string& what)
{
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0 || !std::isfinite(mean)) {
        throw Error(Errc::ZeroMeanColumn, what + " has zero mean");
    }
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v /= mean;
    return out;
}

} // namespace

GreyResult grey_relation(std::span<const double> reference, const Matrix& matrix, std::span<const double> weights,
                         double rho)
{
    const std::size_t n = matrix.rows();
    const std::size_t m = matrix.cols();
    if (n == 0 || m == 0) {
        throw Error(Errc::EmptyMatrix, "grey relation needs a non-empty matrix");
    }
    if (reference.size() != n || weights.size() != m) {
        throw Error(Errc::LayoutMismatch, "reference length must equal rows and weights length must equal columns");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
        throw Error(Errc::InvalidArgument, "resolution factor must lie in (0, 1)");
    }

    const auto ref = mean_scaled(reference, "reference sequence");
    GreyResult g;
    g.rho = rho;
    g.delta = Matrix(n, m);
    g.ma = -std::numeric_limits<double>::infinity();
    g.mi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        const auto col = mean_scaled(matrix.column(j), "indicator column " + std::to_string(j + 1));
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(ref[k] - col[k]);
            g.delta(k, j) = d;
            g.ma = std::max(g.ma, d);
            g.mi = std::min(g.mi, d);
        }
    }

    g.coefficients = Matrix(n, m, 1.0);
    g.degenerate = g.ma == 0.0;
    if (!g.degenerate) {
        const double spread = rho * g.ma;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                g.coefficients(k, j) = (g.mi + spread) / (g.delta(k, j) + spread);
            }
        }
    }

    g.relation.assign(m, 0.0);
    g.degrees.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += g.coefficients(k, j);
        g.relation[j] = sum / static_cast<double>(n);
        g.degrees[j] = weights[j] * g.relation[j];
    }
    return g;
}

PerformanceSeries performance_score(const IndicatorMatrix& normalized, std::span<const double> degrees, int window)
{
    if (window < 1) {
        throw Error(Errc::InvalidArgument, "window must be >= 1");
    }
    if (degrees.size() != normalized.rows.cols()) {
        throw Error(Errc::LayoutMismatch, "degrees do not match indicator layout");
    }
    const std::size_t n = normalized.rows.rows();
    const std::size_t m = normalized.rows.cols();
    const auto w = static_cast<std::size_t>(window);

    PerformanceSeries s;
    s.window = window;
    s.player = normalized.player;
    s.match_id = normalized.match_id;
    s.point_no = normalized.point_index;
    s.scores.resize(n);

    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t lo = t + 1 >= w ? t + 1 - w : 0;
        const double len = static_cast<double>(t + 1 - lo);
        double score = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t k = lo; k <= t; ++k) sum += normalized.rows(k, j);
            score += degrees[j] * (sum / len);
        }
        s.scores[t] = score;
    }
    return s;
}

} // namespace tennis
