#include "tennis/match_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "tennis/error.hpp"

namespace tennis {

const char* to_string(Player p) noexcept { return p == Player::P1 ? "P1" : "P2"; }

namespace {

enum Column : std::size_t {
    kMatchId, kPlayer1, kPlayer2, kSetNo, kGameNo, kPointNo,
    kP1Sets, kP2Sets, kP1Games, kP2Games, kP1Score, kP2Score,
    kServer, kServeNo, kPointVictor, kP1PointsWon, kP2PointsWon, kGameVictor, kSetVictor,
    kP1Ace, kP2Ace, kP1Winner, kP2Winner, kWinnerShotType,
    kP1DoubleFault, kP2DoubleFault, kP1UnfErr, kP2UnfErr,
    kP1NetPt, kP2NetPt, kP1NetPtWon, kP2NetPtWon,
    kP1BreakPt, kP2BreakPt, kP1BreakPtWon, kP2BreakPtWon, kP1BreakPtMissed, kP2BreakPtMissed,
    kP1DistanceRun, kP2DistanceRun, kRallyCount, kSpeedMph,
    kServeWidth, kServeDepth, kReturnDepth,
    kColumnCount
};

const std::vector<std::string> kColumns = {
    "match_id", "player1", "player2", "set_no", "game_no", "point_no",
    "p1_sets", "p2_sets", "p1_games", "p2_games", "p1_score", "p2_score",
    "server", "serve_no", "point_victor", "p1_points_won", "p2_points_won", "game_victor", "set_victor",
    "p1_ace", "p2_ace", "p1_winner", "p2_winner", "winner_shot_type",
    "p1_double_fault", "p2_double_fault", "p1_unf_err", "p2_unf_err",
    "p1_net_pt", "p2_net_pt", "p1_net_pt_won", "p2_net_pt_won",
    "p1_break_pt", "p2_break_pt", "p1_break_pt_won", "p2_break_pt_won", "p1_break_pt_missed", "p2_break_pt_missed",
    "p1_distance_run", "p2_distance_run", "rally_count", "speed_mph",
    "serve_width", "serve_depth", "return_depth",
};

bool is_optional_column(std::size_t c)
{
    return c == kSpeedMph || c == kServeWidth || c == kServeDepth || c == kReturnDepth;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan"; }

struct RowError {
    std::string reason;
};

class RowReader {
public:
    RowReader(const std::vector<std::string>& cells, const std::array<std::ptrdiff_t, kColumnCount>& index)
        : cells_(cells), index_(index) {}

    std::string_view raw(Column c) const
    {
        const auto pos = index_[c];
        if (pos < 0) return {};
        return trim(cells_[static_cast<std::size_t>(pos)]);
    }

    std::string text(Column c) const
    {
        const auto v = raw(c);
        if (v.empty()) fail(c, "empty value");
        return std::string(v);
    }

    int integer(Column c, int lo = 0) const
    {
        const auto v = raw(c);
        int out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
            // Accept integral values written as "3.0".
            double d = 0.0;
            const auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), d);
            if (v.empty() || e2 != std::errc() || p2 != v.data() + v.size() || d != static_cast<int>(d)) {
                fail(c, "expected integer, got '" + std::string(v) + "'");
            }
            out = static_cast<int>(d);
        }
        if (out < lo) fail(c, "value " + std::to_string(out) + " below " + std::to_string(lo));
        return out;
    }

    double real(Column c) const
    {
        const auto v = raw(c);
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
            fail(c, "expected number, got '" + std::string(v) + "'");
        }
        if (out < 0.0) fail(c, "negative value");
        return out;
    }

    std::optional<double> optional_real(Column c) const
    {
        if (is_missing_token(raw(c))) return std::nullopt;
        return real(c);
    }

    bool flag(Column c) const
    {
        const int v = integer(c);
        if (v > 1) fail(c, "expected 0/1 flag");
        return v == 1;
    }

    Player player(Column c) const
    {
        const int v = integer(c);
        if (v != 1 && v != 2) fail(c, "expected 1 or 2");
        return static_cast<Player>(v);
    }

    Victor victor(Column c) const
    {
        const int v = integer(c);
        if (v > 2) fail(c, "expected 0, 1 or 2");
        return static_cast<Victor>(v);
    }

    [[noreturn]] void fail(Column c, const std::string& why) const
    {
        throw RowError{kColumns[c] + ": " + why};
    }

private:
    const std::vector<std::string>& cells_;
    const std::array<std::ptrdiff_t, kColumnCount>& index_;
};

ShotType parse_shot(const RowReader& r)
{
    const auto v = r.raw(kWinnerShotType);
    if (is_missing_token(v) || v == "0") return ShotType::None;
    if (v == "F") return ShotType::Forehand;
    if (v == "B") return ShotType::Backhand;
    r.fail(kWinnerShotType, "unknown shot type '" + std::string(v) + "'");
}

ServeWidth parse_width(const RowReader& r)
{
    const auto v = r.raw(kServeWidth);
    if (is_missing_token(v)) return ServeWidth::Missing;
    if (v == "B") return ServeWidth::B;
    if (v == "BC") return ServeWidth::BC;
    if (v == "BW") return ServeWidth::BW;
    if (v == "C") return ServeWidth::C;
    if (v == "W") return ServeWidth::W;
    r.fail(kServeWidth, "unknown serve width '" + std::string(v) + "'");
}

ServeDepth parse_serve_depth(const RowReader& r)
{
    const auto v = r.raw(kServeDepth);
    if (is_missing_token(v)) return ServeDepth::Missing;
    if (v == "CTL") return ServeDepth::CTL;
    if (v == "NCTL") return ServeDepth::NCTL;
    r.fail(kServeDepth, "unknown serve depth '" + std::string(v) + "'");
}

ReturnDepth parse_return_depth(const RowReader& r)
{
    const auto v = r.raw(kReturnDepth);
    if (is_missing_token(v)) return ReturnDepth::Missing;
    if (v == "D") return ReturnDepth::D;
    if (v == "ND") return ReturnDepth::ND;
    r.fail(kReturnDepth, "unknown return depth '" + std::string(v) + "'");
}

PointRecord parse_row(const RowReader& r)
{
    PointRecord p;
    p.match_id = r.text(kMatchId);
    p.player1 = r.text(kPlayer1);
    p.player2 = r.text(kPlayer2);
    p.set_no = r.integer(kSetNo, 1);
    p.game_no = r.integer(kGameNo, 1);
    p.point_no = r.integer(kPointNo, 1);
    p.sets = {r.integer(kP1Sets), r.integer(kP2Sets)};
    p.games = {r.integer(kP1Games), r.integer(kP2Games)};
    const bool tiebreak = p.in_tiebreak();
    try {
        p.score.p1 = encode_score(r.raw(kP1Score), tiebreak);
    } catch (const Error& e) {
        r.fail(kP1Score, e.what());
    }
    try {
        p.score.p2 = encode_score(r.raw(kP2Score), tiebreak);
    } catch (const Error& e) {
        r.fail(kP2Score, e.what());
    }
    p.server = r.player(kServer);
    const int serve_no = r.integer(kServeNo, 1);
    if (serve_no > 2) r.fail(kServeNo, "expected 1 or 2");
    p.serve_no = static_cast<ServeNo>(serve_no);
    p.point_victor = r.victor(kPointVictor);
    p.points_won = {r.integer(kP1PointsWon), r.integer(kP2PointsWon)};
    p.game_victor = r.victor(kGameVictor);
    p.set_victor = r.victor(kSetVictor);
    p.ace = {r.flag(kP1Ace), r.flag(kP2Ace)};
    p.winner = {r.flag(kP1Winner), r.flag(kP2Winner)};
    p.winner_shot_type = parse_shot(r);
    p.double_fault = {r.flag(kP1DoubleFault), r.flag(kP2DoubleFault)};
    p.unf_err = {r.flag(kP1UnfErr), r.flag(kP2UnfErr)};
    p.net_pt = {r.flag(kP1NetPt), r.flag(kP2NetPt)};
    p.net_pt_won = {r.flag(kP1NetPtWon), r.flag(kP2NetPtWon)};
    p.break_pt = {r.flag(kP1BreakPt), r.flag(kP2BreakPt)};
    p.break_pt_won = {r.flag(kP1BreakPtWon), r.flag(kP2BreakPtWon)};
    p.break_pt_missed = {r.flag(kP1BreakPtMissed), r.flag(kP2BreakPtMissed)};
    p.distance_run = {r.real(kP1DistanceRun), r.real(kP2DistanceRun)};
    p.rally_count = r.integer(kRallyCount);
    p.speed_mph = r.optional_real(kSpeedMph);
    p.serve_width = parse_width(r);
    p.serve_depth = parse_serve_depth(r);
    p.return_depth = parse_return_depth(r);
    return p;
}

const char* shot_token(ShotType s)
{
    switch (s) {
    case ShotType::Forehand: return "F";
    case ShotType::Backhand: return "B";
    default: return "0";
    }
}

const char* width_token(ServeWidth w)
{
    switch (w) {
    case ServeWidth::B: return "B";
    case ServeWidth::BC: return "BC";
    case ServeWidth::BW: return "BW";
    case ServeWidth::C: return "C";
    case ServeWidth::W: return "W";
    default: return "NA";
    }
}

const char* serve_depth_token(ServeDepth d)
{
    switch (d) {
    case ServeDepth::CTL: return "CTL";
    case ServeDepth::NCTL: return "NCTL";
    default: return "NA";
    }
}

const char* return_depth_token(ReturnDepth d)
{
    switch (d) {
    case ReturnDepth::D: return "D";
    case ReturnDepth::ND: return "ND";
    default: return "NA";
    }
}

std::string quote_if_needed(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += '"';
    return out;
}

} // namespace

std::string format_real(double v)
{
    // Shortest representation that round-trips.
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

const std::vector<std::string>& schema_columns() { return kColumns; }

int encode_score(std::string_view token, bool tiebreak)
{
    token = trim(token);
    if (tiebreak) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || v < 0) {
            throw Error(Errc::MalformedRow, "bad tie-break score '" + std::string(token) + "'");
        }
        return v;
    }
    if (token == "0") return 0;
    if (token == "15") return 1;
    if (token == "30") return 2;
    if (token == "40") return 3;
    if (token == "AD") return 4;
    throw Error(Errc::MalformedRow, "bad game score '" + std::string(token) + "'");
}

std::string decode_score(int ordinal, bool tiebreak)
{
    if (tiebreak) return std::to_string(ordinal);
    static constexpr std::array<const char*, 5> kTokens = {"0", "15", "30", "40", "AD"};
    if (ordinal < 0 || ordinal > 4) {
        throw Error(Errc::InvalidArgument, "score ordinal out of range: " + std::to_string(ordinal));
    }
    return kTokens[static_cast<std::size_t>(ordinal)];
}

ParseResult parse_csv(const std::filesystem::path& path, SchemaMode mode)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::EmptyFile, "cannot open " + path.string());
    }
    return parse_csv(in, mode);
}

ParseResult parse_csv(std::istream& in, SchemaMode mode)
{
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) {
        throw Error(Errc::EmptyFile, "no header row");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }

    const auto header = split_csv_line(line);
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < header.size(); ++i) {
        position.emplace(std::string(trim(header[i])), i);
    }

    std::array<std::ptrdiff_t, kColumnCount> index{};
    std::vector<bool> known(header.size(), false);
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        const auto it = position.find(kColumns[c]);
        if (it == position.end()) {
            if (mode == SchemaMode::Strict || !is_optional_column(c)) {
                throw Error(Errc::MissingColumn, kColumns[c]);
            }
            index[c] = -1;
        } else {
            index[c] = static_cast<std::ptrdiff_t>(it->second);
            known[it->second] = true;
        }
    }

    ParseResult result;
    std::vector<std::size_t> extra_positions;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!known[i]) {
            result.extra_columns.emplace_back(trim(header[i]));
            extra_positions.push_back(i);
        }
    }

    std::vector<PointRecord> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.data_rows;
        auto cells = split_csv_line(line);
        try {
            if (cells.size() != header.size()) {
                throw RowError{"expected " + std::to_string(header.size()) + " cells, got "
                               + std::to_string(cells.size())};
            }
            RowReader reader(cells, index);
            PointRecord rec = parse_row(reader);
            rec.extras.reserve(extra_positions.size());
            for (auto pos : extra_positions) {
                rec.extras.push_back(std::move(cells[pos]));
            }
            rows.push_back(std::move(rec));
        } catch (const RowError& e) {
            if (mode == SchemaMode::Strict) {
                throw Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": " + e.reason, line_no);
            }
            ++result.dropped_rows;
            result.warnings.push_back("dropped line " + std::to_string(line_no) + ": " + e.reason);
        }
    }

    std::map<std::string, std::size_t> slot;
    for (auto& rec : rows) {
        auto [it, inserted] = slot.emplace(rec.match_id, result.matches.size());
        if (inserted) {
            MatchData m;
            m.match_id = rec.match_id;
            m.players = {rec.player1, rec.player2};
            result.matches.push_back(std::move(m));
        }
        result.matches[it->second].points.push_back(std::move(rec));
    }
    for (auto& m : result.matches) {
        std::stable_sort(m.points.begin(), m.points.end(),
                         [](const PointRecord& a, const PointRecord& b) { return a.point_no < b.point_no; });
    }
    if (result.matches.empty() && result.dropped_rows == 0) {
        throw Error(Errc::EmptyFile, "header present but no data rows");
    }
    return result;
}

void write_csv(std::ostream& out, std::span<const MatchData> matches, std::span<const std::string> extra_columns)
{
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
        out << (c ? "," : "") << kColumns[c];
    }
    for (const auto& e : extra_columns) out << ',' << quote_if_needed(e);
    out << '\n';

    for (const auto& m : matches) {
        for (const auto& p : m.points) {
            const bool tb = p.in_tiebreak();
            out << quote_if_needed(p.match_id) << ',' << quote_if_needed(p.player1) << ','
                << quote_if_needed(p.player2) << ',' << p.set_no << ',' << p.game_no << ',' << p.point_no << ','
                << p.sets.p1 << ',' << p.sets.p2 << ',' << p.games.p1 << ',' << p.games.p2 << ','
                << decode_score(p.score.p1, tb) << ',' << decode_score(p.score.p2, tb) << ','
                << static_cast<int>(p.server) << ',' << static_cast<int>(p.serve_no) << ','
                << static_cast<int>(p.point_victor) << ',' << p.points_won.p1 << ',' << p.points_won.p2 << ','
                << static_cast<int>(p.game_victor) << ',' << static_cast<int>(p.set_victor) << ','
                << p.ace.p1 << ',' << p.ace.p2 << ',' << p.winner.p1 << ',' << p.winner.p2 << ','
                << shot_token(p.winner_shot_type) << ',' << p.double_fault.p1 << ',' << p.double_fault.p2 << ','
                << p.unf_err.p1 << ',' << p.unf_err.p2 << ',' << p.net_pt.p1 << ',' << p.net_pt.p2 << ','
                << p.net_pt_won.p1 << ',' << p.net_pt_won.p2 << ',' << p.break_pt.p1 << ',' << p.break_pt.p2 << ','
                << p.break_pt_won.p1 << ',' << p.break_pt_won.p2 << ',' << p.break_pt_missed.p1 << ','
                << p.break_pt_missed.p2 << ',' << format_real(p.distance_run.p1) << ','
                << format_real(p.distance_run.p2) << ',' << p.rally_count << ','
                << (p.speed_mph ? format_real(*p.speed_mph) : std::string("NA")) << ','
                << width_token(p.serve_width) << ',' << serve_depth_token(p.serve_depth) << ','
                << return_depth_token(p.return_depth);
            for (std::size_t e = 0; e < extra_columns.size(); ++e) {
                out << ',' << (e < p.extras.size() ? quote_if_needed(p.extras[e]) : std::string());
            }
            out << '\n';
        }
    }
}

std::vector<Violation> validate(const MatchData& match)
{
    std::vector<Violation> out;
    if (match.points.empty()) {
        out.push_back({0, "empty_match", "match has no points"});
        return out;
    }
    PerPlayer<int> decided{};
    const PointRecord* prev = nullptr;
    for (std::size_t i = 0; i < match.points.size(); ++i) {
        const auto& p = match.points[i];
        const auto add = [&](const char* rule, std::string msg) { out.push_back({p.point_no, rule, std::move(msg)}); };

        if (p.match_id != match.match_id) {
            add("match_id_consistent", "row belongs to " + p.match_id);
        }
        if (p.point_victor == Victor::None) {
            add("victor_required", "point_victor is none");
        } else {
            ++decided[static_cast<Player>(p.point_victor)];
        }
        if (prev && p.point_no <= prev->point_no) {
            add("point_no_increasing", "point_no " + std::to_string(p.point_no) + " after " + std::to_string(prev->point_no));
        }
        if (prev) {
            for (Player pl : {Player::P1, Player::P2}) {
                if (p.points_won[pl] < prev->points_won[pl]) {
                    add("cumulative_monotone", std::string(to_string(pl)) + " points_won decreased");
                }
                if (p.sets[pl] < prev->sets[pl]) {
                    add("cumulative_monotone", std::string(to_string(pl)) + " sets decreased");
                }
            }
        }
        if (p.points_won.p1 + p.points_won.p2 != decided.p1 + decided.p2) {
            add("points_won_consistent", "points_won sum " + std::to_string(p.points_won.p1 + p.points_won.p2)
                                             + " but " + std::to_string(decided.p1 + decided.p2) + " decided points");
        }
        if (p.game_victor != Victor::None && i + 1 < match.points.size()) {
            const auto& next = match.points[i + 1];
            if (next.game_no == p.game_no && next.set_no == p.set_no) {
                add("game_victor_placement", "game_victor set on a point that does not end the game");
            }
        }
        prev = &p;
    }
    return out;
}

} // namespace tennis
