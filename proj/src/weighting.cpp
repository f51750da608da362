#include "tennis/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tennis/error.hpp"

namespace tennis {

MinMaxScaler MinMaxScaler::fit(const Matrix& matrix, std::span<const Direction> directions, double epsilon)
{
    if (matrix.empty()) {
        throw Error(Errc::EmptyMatrix, "cannot normalize an empty matrix");
    }
    if (directions.size() != matrix.cols()) {
        throw Error(Errc::LayoutMismatch, "one direction per column required");
    }
    MinMaxScaler s;
    s.directions.assign(directions.begin(), directions.end());
    s.epsilon = epsilon;
    s.mins.assign(matrix.cols(), 0.0);
    s.maxs.assign(matrix.cols(), 0.0);
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        double lo = matrix(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < matrix.rows(); ++i) {
            lo = std::min(lo, matrix(i, j));
            hi = std::max(hi, matrix(i, j));
        }
        s.mins[j] = lo;
        s.maxs[j] = hi;
    }
    return s;
}

double MinMaxScaler::apply(std::size_t column, double value) const
{
    const double range = maxs[column] - mins[column];
    if (!(range > 0.0)) return epsilon;
    const double scaled = directions[column] == Direction::Benefit ? (value - mins[column]) / range
                                                                   : (maxs[column] - value) / range;
    return scaled + epsilon;
}

Matrix MinMaxScaler::transform(const Matrix& matrix) const
{
    if (matrix.cols() != mins.size()) {
        throw Error(Errc::LayoutMismatch, "matrix width differs from fitted scaler");
    }
    Matrix out(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            out(i, j) = apply(j, matrix(i, j));
        }
    }
    return out;
}

Matrix normalize_minmax(const Matrix& matrix, std::span<const Direction> directions, double epsilon)
{
    return MinMaxScaler::fit(matrix, directions, epsilon).transform(matrix);
}

WeightVector entropy_weights(const Matrix& normalized, double epsilon)
{
    const std::size_t n = normalized.rows();
    const std::size_t m = normalized.cols();
    if (n < 2 || m == 0) {
        throw Error(Errc::EmptyMatrix, "entropy weights need at least 2 rows and 1 column");
    }
    WeightVector w;
    w.epsilon = epsilon;
    w.raw_entropy.assign(m, 1.0);
    const double inv_log_n = 1.0 / std::log(static_cast<double>(n));

    for (std::size_t j = 0; j < m; ++j) {
        double total = 0.0;
        double lo = normalized(0, j);
        double hi = lo;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = normalized(i, j);
            if (!(x > 0.0)) {
                throw Error(Errc::InvalidArgument, "entropy weights require strictly positive entries");
            }
            total += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        // A constant column is exactly uniform; skip the rounding in p ln p.
        if (lo == hi) continue;
        double h = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = normalized(i, j) / total;
            h -= p * std::log(p);
        }
        w.raw_entropy[j] = std::clamp(h * inv_log_n, 0.0, 1.0);
    }

    double divergence = 0.0;
    for (double e : w.raw_entropy) divergence += 1.0 - e;
    w.raw_weights.resize(m);
    if (divergence > 0.0) {
        for (std::size_t j = 0; j < m; ++j) w.raw_weights[j] = (1.0 - w.raw_entropy[j]) / divergence;
    } else {
        w.degenerate = true;
        std::fill(w.raw_weights.begin(), w.raw_weights.end(), 1.0 / static_cast<double>(m));
    }
    w.adjusted = w.raw_weights;
    return w;
}

namespace detail {

WeightVector apply_serve_offset(WeightVector weights, double xi, std::size_t serve_column)
{
    if (serve_column >= weights.raw_weights.size()) {
        throw Error(Errc::LayoutMismatch, "serve column outside weight vector");
    }
    weights.xi = xi;
    weights.adjusted = weights.raw_weights;
    weights.adjusted[serve_column] += xi;
    const double total = std::accumulate(weights.adjusted.begin(), weights.adjusted.end(), 0.0);
    for (double& v : weights.adjusted) v /= total;
    return weights;
}

} // namespace detail

WeightVector apply_serve_factor(WeightVector weights, double xi, std::size_t serve_column)
{
    if (!(xi >= kMinServeFactor && xi <= kMaxServeFactor)) {
        throw Error(Errc::XiOutOfRange, "xi = " + std::to_string(xi) + " outside [0.05, 0.15]");
    }
    return detail::apply_serve_offset(std::move(weights), xi, serve_column);
}

} // namespace tennis
