#pragma once

#include <span>
#include <string>
#include <vector>

#include "tennis/indicators.hpp"
#include "tennis/match_data.hpp"
#include "tennis/momentum.hpp"
#include "tennis/relational.hpp"
#include "tennis/weighting.hpp"

namespace tennis {

/// Which points share one set of entropy weights and grey degrees.
enum class Scope { Tournament, Match };

const char* to_string(Scope s) noexcept;
Scope scope_from_string(const std::string& s);

struct ScoringParams {
    int window = 10;
    double xi = 0.1;
    double rho = kDefaultResolution;
    double alpha = kDefaultSmoothing;
    int ema_period = kDefaultEmaPeriod;
    double epsilon = kDefaultEpsilon;
    Scope scope = Scope::Tournament;
};

/// Throws XiOutOfRange / InvalidArgument for values outside documented ranges.
void check_params(const ScoringParams& params);

/// Weights, grey degrees and scores for indicator matrices that share a scope.
struct ScopeScores {
    MinMaxScaler scaler;
    MinMaxScaler reference_scaler;
    WeightVector weights;
    GreyResult grey;
    std::vector<PerformanceSeries> performance;
    std::vector<MomentumSeries> momentum;
};

/// Min-max scale the stacked matrices, derive EWM weights (with the serve
/// factor on the X1 column) and grey degrees against the scaled scoring
/// margin, then score and smooth each matrix.
ScopeScores score_indicator_scope(std::span<const IndicatorMatrix> matrices, std::span<const Direction> directions,
                                  const ScoringParams& params);

struct MatchScores {
    std::string match_id;
    std::size_t scope = 0;
    PerPlayer<IndicatorMatrix> indicators;
    PerPlayer<PerformanceSeries> performance;
    PerPlayer<MomentumSeries> momentum;
};

struct ScoreResult {
    struct ScopeSummary {
        std::vector<std::string> match_ids;
        WeightVector weights;
        std::vector<double> relation;
        std::vector<double> degrees;
        double ma = 0.0;
        double mi = 0.0;
    };
    std::vector<IndicatorSpec> specs;
    std::vector<ScopeSummary> scopes;
    std::vector<MatchScores> matches;
};

/// Indicator windows longer than a match are shortened to its length.
ScoreResult score_matches(std::span<const MatchData> matches, const ScoringParams& params);

} // namespace tennis
