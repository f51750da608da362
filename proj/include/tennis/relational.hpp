#pragma once

#include <span>
#include <string>
#include <vector>

#include "tennis/indicators.hpp"
#include "tennis/matrix.hpp"

namespace tennis {

inline constexpr double kDefaultResolution = 0.5;

struct GreyResult {
    Matrix delta;
    double ma = 0.0;
    double mi = 0.0;
    Matrix coefficients;
    /// Mean relational coefficient per indicator, before weighting.
    std::vector<double> relation;
    /// Weighted grey relational degree per indicator: weight * relation.
    std::vector<double> degrees;
    double rho = kDefaultResolution;
    /// All sequences coincide after mean scaling (MA = 0); coefficients are 1.
    bool degenerate = false;
};

/// Grey relational analysis of each column of `matrix` against `reference`.
/// Every sequence is divided by its own mean first, so columns and the
/// reference must have nonzero means.
GreyResult grey_relation(std::span<const double> reference, const Matrix& matrix, std::span<const double> weights,
                         double rho = kDefaultResolution);

struct PerformanceSeries {
    std::vector<double> scores;
    std::vector<int> point_no;
    int window = 10;
    Player player = Player::P1;
    std::string match_id;
};

/// S(t) = sum_i degree_i * mean of normalized indicator i over the trailing
/// window ending at t (partial at the start). `normalized` must already be
/// min-max scaled.
PerformanceSeries performance_score(const IndicatorMatrix& normalized, std::span<const double> degrees, int window);

} // namespace tennis
