#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tennis {

enum class Player : std::uint8_t { P1 = 1, P2 = 2 };

constexpr Player opponent(Player p) noexcept { return p == Player::P1 ? Player::P2 : Player::P1; }
const char* to_string(Player p) noexcept;

/// A pair of per-player values addressed by Player.
template <typename T>
struct PerPlayer {
    T p1{};
    T p2{};

    T& operator[](Player p) noexcept { return p == Player::P1 ? p1 : p2; }
    const T& operator[](Player p) const noexcept { return p == Player::P1 ? p1 : p2; }

    friend bool operator==(const PerPlayer&, const PerPlayer&) = default;
};

enum class Victor : std::uint8_t { None = 0, P1 = 1, P2 = 2 };

constexpr bool won_by(Victor v, Player p) noexcept { return static_cast<int>(v) == static_cast<int>(p); }

enum class ServeNo : std::uint8_t { First = 1, Second = 2 };
enum class ShotType : std::uint8_t { None = 0, Forehand = 1, Backhand = 2 };
enum class ServeWidth : std::uint8_t { Missing = 0, B, BC, BW, C, W };
enum class ServeDepth : std::uint8_t { Missing = 0, CTL, NCTL };
enum class ReturnDepth : std::uint8_t { Missing = 0, D, ND };

/// One row of point-by-point match data.
///
/// Game scores are ordinals: 0, 15, 30, 40, AD map to 0..4. Inside a
/// tie-break (games level at 6-6) the numeric point count is stored as-is.
/// Scores, games and sets describe the state before the point is played;
/// points_won counts include the point itself.
struct PointRecord {
    std::string match_id;
    std::string player1;
    std::string player2;
    int set_no = 1;
    int game_no = 1;
    int point_no = 1;
    PerPlayer<int> sets;
    PerPlayer<int> games;
    PerPlayer<int> score;
    Player server = Player::P1;
    ServeNo serve_no = ServeNo::First;
    Victor point_victor = Victor::None;
    Victor game_victor = Victor::None;
    Victor set_victor = Victor::None;
    PerPlayer<int> points_won;
    PerPlayer<bool> ace;
    PerPlayer<bool> winner;
    ShotType winner_shot_type = ShotType::None;
    PerPlayer<bool> double_fault;
    PerPlayer<bool> unf_err;
    PerPlayer<bool> net_pt;
    PerPlayer<bool> net_pt_won;
    PerPlayer<bool> break_pt;
    PerPlayer<bool> break_pt_won;
    PerPlayer<bool> break_pt_missed;
    PerPlayer<double> distance_run;
    int rally_count = 0;
    std::optional<double> speed_mph;
    ServeWidth serve_width = ServeWidth::Missing;
    ServeDepth serve_depth = ServeDepth::Missing;
    ReturnDepth return_depth = ReturnDepth::Missing;
    /// Values of columns outside the known schema, aligned with ParseResult::extra_columns.
    std::vector<std::string> extras;

    bool in_tiebreak() const noexcept { return games.p1 == 6 && games.p2 == 6; }

    friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

struct MatchData {
    std::string match_id;
    PerPlayer<std::string> players;
    std::vector<PointRecord> points;

    friend bool operator==(const MatchData&, const MatchData&) = default;
};

enum class SchemaMode { Strict, Lenient };

struct ParseResult {
    std::vector<MatchData> matches;
    std::vector<std::string> extra_columns;
    std::size_t data_rows = 0;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

/// Column names of the known schema, in the order write_csv emits them.
const std::vector<std::string>& schema_columns();

/// Parse point-by-point CSV. Rows are grouped by match_id (first-seen order)
/// and sorted by point_no. Blank or "NA" cells of optional columns are
/// missing. Strict mode throws on a missing column or any malformed row;
/// lenient mode tolerates missing optional columns and drops malformed rows.
ParseResult parse_csv(const std::filesystem::path& path, SchemaMode mode = SchemaMode::Strict);
ParseResult parse_csv(std::istream& in, SchemaMode mode = SchemaMode::Strict);

void write_csv(std::ostream& out, std::span<const MatchData> matches,
               std::span<const std::string> extra_columns = {});

struct Violation {
    int point_no = 0;
    std::string rule_id;
    std::string message;
};

/// Rule ids: victor_required, point_no_increasing, cumulative_monotone,
/// points_won_consistent, game_victor_placement, match_id_consistent, empty_match.
std::vector<Violation> validate(const MatchData& match);

int encode_score(std::string_view token, bool tiebreak);
/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);
std::string decode_score(int ordinal, bool tiebreak);

} // namespace tennis
