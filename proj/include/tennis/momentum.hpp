#pragma once

#include <span>
#include <string>
#include <vector>

#include "tennis/match_data.hpp"

namespace tennis {

inline constexpr double kDefaultSmoothing = 0.9;
inline constexpr int kDefaultEmaPeriod = 10;
inline constexpr double kDefaultTieEps = 1e-4;

struct MomentumSeries {
    std::vector<double> values;
    double alpha = kDefaultSmoothing;
    int period = kDefaultEmaPeriod;
    std::vector<int> point_no;
    Player player = Player::P1;
    std::string match_id;
};

/// Normalized exponential moving average truncated to the last `period`
/// samples:
///   EMA_t = sum_{k=0..K} (1-alpha)^k y_{t-k} / sum_{k=0..K} (1-alpha)^k,
///   K = min(t, period - 1).
MomentumSeries ema(std::span<const double> series, double alpha = kDefaultSmoothing, int period = kDefaultEmaPeriod);

enum class Leader { P1, P2, Tied };

const char* to_string(Leader l) noexcept;

struct SwingLabel {
    int point_no = 0;
    Leader leader = Leader::Tied;
    /// The leader differs from the most recent non-tied leader.
    bool swing = false;
};

std::vector<SwingLabel> label_swings(const MomentumSeries& p1, const MomentumSeries& p2,
                                     double tie_eps = kDefaultTieEps);

/// Swing labels straight from a momentum differential (p1 - p2).
std::vector<SwingLabel> label_differential(std::span<const double> differential, std::span<const int> point_no,
                                           double tie_eps = kDefaultTieEps);

} // namespace tennis
