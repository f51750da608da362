#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tennis/match_data.hpp"
#include "tennis/matrix.hpp"

namespace tennis {

enum class IndicatorId { X1 = 1, X2, X3, X4, X5, X6, X7, X8, X9, X10 };

enum class Direction { Benefit, Cost };

/// One evaluation indicator computed over a trailing window of points.
///
/// All windows are trailing and include the current point; the first
/// window-1 points use the partial window available. Ratios whose
/// denominator is empty in the window evaluate to 0.5.
///
///  X1  serve advantage     own-serve points won / own-serve points
///  X2  ace incidence       aces / own-serve points
///  X3  unforced errors     own unforced errors / points (cost)
///  X4  scoring advantage   (points won - points lost) / points
///  X5  running distance    mean(opponent distance - own distance)
///  X6  games and sets      cumulative (games won + 2 sets won) differential
///  X7  return depth        deep returns / own returns with recorded depth
///  X8  serve depth         CTL serves / own serves with recorded depth
///  X9  serve speed         mean imputed speed of own serves; the player's
///                          match median when the window has no own serve
///  X10 forehand incidence  forehand winners / own winners
struct IndicatorSpec {
    IndicatorId id = IndicatorId::X1;
    std::string name;
    Direction direction = Direction::Benefit;
    int window = 10;
};

std::vector<IndicatorSpec> default_indicator_specs(int window = 10);

/// Windowed indicator values for one player of one match, one row per point.
struct IndicatorMatrix {
    Player player = Player::P1;
    std::string match_id;
    std::vector<IndicatorId> ids;
    Matrix rows;
    std::vector<int> point_index;
    /// Scoring margin: in-game ordinal margin (clamped to +-4) plus 4 * games margin.
    std::vector<double> reference;
};

IndicatorMatrix compute_indicators(const MatchData& match, Player player, std::span<const IndicatorSpec> specs);

/// Replace missing serve speeds with the server's per-match median, falling
/// back to the match-wide median, then to 0 (with a warning).
MatchData impute_speed(const MatchData& match, std::vector<std::string>* warnings = nullptr);

void write_indicator_csv(std::ostream& out, const IndicatorMatrix& m);

} // namespace tennis
