#pragma once

#include <span>
#include <vector>

#include "tennis/indicators.hpp"
#include "tennis/matrix.hpp"

namespace tennis {

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr double kMinServeFactor = 0.05;
inline constexpr double kMaxServeFactor = 0.15;

/// Column-wise min-max scaling fitted on one matrix and reusable on rows of
/// the same layout. Benefit columns map to (x - min)/(max - min) + eps, cost
/// columns to (max - x)/(max - min) + eps, constant columns to eps.
struct MinMaxScaler {
    std::vector<double> mins;
    std::vector<double> maxs;
    std::vector<Direction> directions;
    double epsilon = kDefaultEpsilon;

    static MinMaxScaler fit(const Matrix& matrix, std::span<const Direction> directions,
                            double epsilon = kDefaultEpsilon);

    double apply(std::size_t column, double value) const;
    Matrix transform(const Matrix& matrix) const;
};

Matrix normalize_minmax(const Matrix& matrix, std::span<const Direction> directions,
                        double epsilon = kDefaultEpsilon);

struct WeightVector {
    std::vector<double> raw_entropy;
    std::vector<double> raw_weights;
    std::vector<double> adjusted;
    double xi = 0.0;
    double epsilon = kDefaultEpsilon;
    /// Every column had entropy 1; raw weights fell back to uniform.
    bool degenerate = false;
};

/// Entropy weights of a strictly positive (normalized) matrix. `adjusted`
/// is left equal to the raw weights until apply_serve_factor runs.
WeightVector entropy_weights(const Matrix& normalized, double epsilon = kDefaultEpsilon);

/// Add xi to the serve column's raw weight and renormalize. Throws
/// XiOutOfRange unless xi is within [0.05, 0.15].
WeightVector apply_serve_factor(WeightVector weights, double xi, std::size_t serve_column = 0);

namespace detail {
/// apply_serve_factor without the range guard.
WeightVector apply_serve_offset(WeightVector weights, double xi, std::size_t serve_column);
} // namespace detail

} // namespace tennis
