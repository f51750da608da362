#include "tennis/indicators.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <ostream>

#include "tennis/error.hpp"

namespace tennis {

namespace {

std::optional<double> median(std::vector<double> v)
{
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Trailing-window sums over per-point series via prefix sums.
class Windowed {
public:
    explicit Windowed(const std::vector<double>& values) : prefix_(values.size() + 1, 0.0)
    {
        for (std::size_t i = 0; i < values.size(); ++i) prefix_[i + 1] = prefix_[i] + values[i];
    }
    /// Sum over points [t - window + 1, t], clipped at 0.
    double sum(std::size_t t, std::size_t window) const
    {
        const std::size_t lo = t + 1 >= window ? t + 1 - window : 0;
        return prefix_[t + 1] - prefix_[lo];
    }

private:
    std::vector<double> prefix_;
};

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.5; }

} // namespace

std::vector<IndicatorSpec> default_indicator_specs(int window)
{
    return {
        {IndicatorId::X1, "serve_advantage", Direction::Benefit, window},
        {IndicatorId::X2, "ace_incidence", Direction::Benefit, window},
        {IndicatorId::X3, "unforced_errors", Direction::Cost, window},
        {IndicatorId::X4, "scoring_advantage", Direction::Benefit, window},
        {IndicatorId::X5, "running_distance", Direction::Benefit, window},
        {IndicatorId::X6, "games_and_sets", Direction::Benefit, window},
        {IndicatorId::X7, "return_depth", Direction::Benefit, window},
        {IndicatorId::X8, "serve_depth", Direction::Benefit, window},
        {IndicatorId::X9, "serve_speed", Direction::Benefit, window},
        {IndicatorId::X10, "forehand_incidence", Direction::Benefit, window},
    };
}

MatchData impute_speed(const MatchData& match, std::vector<std::string>* warnings)
{
    PerPlayer<std::vector<double>> observed;
    std::vector<double> all;
    bool any_missing = false;
    for (const auto& p : match.points) {
        if (p.speed_mph) {
            observed[p.server].push_back(*p.speed_mph);
            all.push_back(*p.speed_mph);
        } else {
            any_missing = true;
        }
    }
    if (!any_missing) return match;

    const auto overall = median(all);
    if (!overall && warnings) {
        warnings->push_back("match " + match.match_id + ": no observed serve speeds, imputing 0");
    }
    const PerPlayer<double> fill{
        median(observed.p1).value_or(overall.value_or(0.0)),
        median(observed.p2).value_or(overall.value_or(0.0)),
    };

    MatchData out = match;
    for (auto& p : out.points) {
        if (!p.speed_mph) p.speed_mph = fill[p.server];
    }
    return out;
}

IndicatorMatrix compute_indicators(const MatchData& raw_match, Player player, std::span<const IndicatorSpec> specs)
{
    const std::size_t n = raw_match.points.size();
    for (const auto& s : specs) {
        const int id = static_cast<int>(s.id);
        if (id < 1 || id > 10) {
            throw Error(Errc::UnknownIndicator, "indicator id " + std::to_string(id));
        }
        if (s.window < 1) {
            throw Error(Errc::InvalidArgument, "indicator window must be >= 1");
        }
        if (static_cast<std::size_t>(s.window) > n) {
            throw Error(Errc::WindowTooLarge, "window " + std::to_string(s.window) + " exceeds "
                                                  + std::to_string(n) + " points in " + raw_match.match_id);
        }
    }

    const MatchData match = impute_speed(raw_match);
    const Player opp = opponent(player);

    std::vector<double> ones(n, 1.0), own_serve(n), own_serve_won(n), ace(n), unf(n), margin(n), dist(n), ladder(n),
        returns_known(n), returns_deep(n), depth_known(n), depth_ctl(n), speed(n), winners(n), forehands(n);
    std::vector<double> own_speeds;
    double cumulative = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& p = match.points[t];
        const bool serving = p.server == player;
        own_serve[t] = serving;
        own_serve_won[t] = serving && won_by(p.point_victor, player);
        ace[t] = p.ace[player];
        unf[t] = p.unf_err[player];
        margin[t] = won_by(p.point_victor, player) ? 1.0 : won_by(p.point_victor, opp) ? -1.0 : 0.0;
        dist[t] = p.distance_run[opp] - p.distance_run[player];
        cumulative += won_by(p.game_victor, player) ? 1.0 : won_by(p.game_victor, opp) ? -1.0 : 0.0;
        cumulative += won_by(p.set_victor, player) ? 2.0 : won_by(p.set_victor, opp) ? -2.0 : 0.0;
        ladder[t] = cumulative;
        returns_known[t] = !serving && p.return_depth != ReturnDepth::Missing;
        returns_deep[t] = !serving && p.return_depth == ReturnDepth::D;
        depth_known[t] = serving && p.serve_depth != ServeDepth::Missing;
        depth_ctl[t] = serving && p.serve_depth == ServeDepth::CTL;
        speed[t] = serving ? *p.speed_mph : 0.0;
        if (serving) own_speeds.push_back(*p.speed_mph);
        winners[t] = p.winner[player];
        forehands[t] = p.winner[player] && p.winner_shot_type == ShotType::Forehand;
    }
    const double speed_fallback = median(own_speeds).value_or(0.0);

    const Windowed w_ones(ones), w_serve(own_serve), w_serve_won(own_serve_won), w_ace(ace), w_unf(unf),
        w_margin(margin), w_dist(dist), w_ret_known(returns_known), w_ret_deep(returns_deep),
        w_depth_known(depth_known), w_depth_ctl(depth_ctl), w_speed(speed), w_winners(winners),
        w_forehands(forehands);

    IndicatorMatrix out;
    out.player = player;
    out.match_id = match.match_id;
    out.rows = Matrix(n, specs.size());
    out.point_index.resize(n);
    out.reference.resize(n);
    for (const auto& s : specs) out.ids.push_back(s.id);

    for (std::size_t t = 0; t < n; ++t) {
        const auto& p = match.points[t];
        out.point_index[t] = p.point_no;
        const double game_margin = std::clamp(p.score[player] - p.score[opp], -4, 4);
        out.reference[t] = game_margin + 4.0 * (p.games[player] - p.games[opp]);

        for (std::size_t j = 0; j < specs.size(); ++j) {
            const auto w = static_cast<std::size_t>(specs[j].window);
            const double len = w_ones.sum(t, w);
            double v = 0.0;
            switch (specs[j].id) {
            case IndicatorId::X1: v = ratio(w_serve_won.sum(t, w), w_serve.sum(t, w)); break;
            case IndicatorId::X2: v = ratio(w_ace.sum(t, w), w_serve.sum(t, w)); break;
            case IndicatorId::X3: v = w_unf.sum(t, w) / len; break;
            case IndicatorId::X4: v = w_margin.sum(t, w) / len; break;
            case IndicatorId::X5: v = w_dist.sum(t, w) / len; break;
            case IndicatorId::X6: v = ladder[t]; break;
            case IndicatorId::X7: v = ratio(w_ret_deep.sum(t, w), w_ret_known.sum(t, w)); break;
            case IndicatorId::X8: v = ratio(w_depth_ctl.sum(t, w), w_depth_known.sum(t, w)); break;
            case IndicatorId::X9: {
                const double serves = w_serve.sum(t, w);
                v = serves > 0.0 ? w_speed.sum(t, w) / serves : speed_fallback;
                break;
            }
            case IndicatorId::X10: v = ratio(w_forehands.sum(t, w), w_winners.sum(t, w)); break;
            }
            out.rows(t, j) = v;
        }
    }
    return out;
}

void write_indicator_csv(std::ostream& out, const IndicatorMatrix& m)
{
    out << "match_id,player,point_no";
    for (auto id : m.ids) out << ",x" << static_cast<int>(id);
    out << ",reference\n";
    for (std::size_t t = 0; t < m.rows.rows(); ++t) {
        out << m.match_id << ',' << to_string(m.player) << ',' << m.point_index[t];
        for (double v : m.rows.row(t)) out << ',' << v;
        out << ',' << m.reference[t] << '\n';
    }
}

} // namespace tennis
