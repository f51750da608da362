#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tennis/match_data.hpp"
#include "tennis/scoring.hpp"

namespace tennis {

struct MannWhitneyResult {
    double u = 0.0;   ///< min(U1, U2)
    double u1 = 0.0;  ///< n1*n2 + n1(n1+1)/2 - R1
    double u2 = 0.0;
    double r1 = 0.0;  ///< rank sum of x (midranks for ties)
    double r2 = 0.0;
    double p = 1.0;   ///< two-sided
    bool exact = false;
};

/// Pooled sizes up to this use the exact permutation distribution.
inline constexpr std::size_t kExactMannWhitneyLimit = 20;

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// c(alpha) * sqrt((n1 + n2) / (n1 n2)), the large-sample KS rejection threshold.
double ks_critical_value(double alpha, std::size_t n1, std::size_t n2);

struct TestReport {
    double u_stat = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double d_stat = 0.0;
    double p_mwu = 1.0;
    double p_ks = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double alpha_level = 0.05;
    double ks_critical = 0.0;
    bool reject_mwu = false;
    bool reject_ks = false;
};

TestReport compare_samples(std::span<const double> real, std::span<const double> simulated, double alpha_level = 0.05);

enum class NullScheme { ShufflePoints, IidResample };

const char* to_string(NullScheme s) noexcept;
NullScheme null_scheme_from_string(const std::string& s);

struct NullSimConfig {
    int n_datasets = 1000;
    std::uint64_t seed = 42;
    NullScheme scheme = NullScheme::ShufflePoints;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// |lag-1 autocorrelation|; 0 for series shorter than 3 or with zero variance.
double lag1_autocorrelation(std::span<const double> series);

/// Momentum summary of every (match, player) in scoring order: P1 then P2 per match.
std::vector<double> momentum_summaries(const ScoreResult& scores);

/// Matches with their points permuted (or resampled) for replicate `index`.
/// Records are exchanged only among points served by the same player; the
/// scoreboard fields (point/game/set numbers, sets, games, score) stay with
/// the slot.
std::vector<MatchData> null_dataset(std::span<const MatchData> matches, NullScheme scheme, std::uint64_t seed,
                                    std::uint64_t index);

/// One summary per replicate. Replicate r rescores a randomized copy of
/// every match and reports the momentum summary of (match, player) number
/// r mod (2 * matches), so the simulated sample mixes the same units the
/// real sample is made of.
std::vector<double> simulate_null(std::span<const MatchData> matches, const NullSimConfig& cfg,
                                  const ScoringParams& params);

struct MomentumValidation {
    std::vector<double> real;
    std::vector<double> simulated;
    TestReport report;
    NullSimConfig config;
};

MomentumValidation validate_momentum(std::span<const MatchData> matches, const NullSimConfig& cfg,
                                     const ScoringParams& params, double alpha_level = 0.05);

} // namespace tennis
