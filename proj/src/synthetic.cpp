#include "tennis/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tennis/rng.hpp"

namespace tennis::synthetic {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }
double tilt(double p, double shift) { return logistic(logit(p) + shift); }

std::string clock(double seconds)
{
    const auto s = static_cast<long>(seconds);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02ld:%02ld:%02ld", s / 3600, (s / 60) % 60, s % 60);
    return buf;
}

/// Ordinal display score for a standard game from raw point counts.
PerPlayer<int> game_display(int a, int b)
{
    if (a >= 3 && b >= 3) {
        if (a == b) return {3, 3};
        return a > b ? PerPlayer<int>{4, 3} : PerPlayer<int>{3, 4};
    }
    return {std::min(a, 3), std::min(b, 3)};
}

class MatchSimulator {
public:
    explicit MatchSimulator(const SimulationParams& p) : p_(p), rng_(p.seed) {}

    MatchData run()
    {
        MatchData m;
        m.match_id = p_.match_id;
        m.players = p_.players;
        Player set_opener = Player::P1;
        int set_no = 1;
        while (sets_.p1 < p_.sets_to_win && sets_.p2 < p_.sets_to_win) {
            play_set(m, set_no, set_opener);
            ++set_no;
        }
        return m;
    }

private:
    void play_set(MatchData& m, int set_no, Player& game_server)
    {
        games_ = {};
        int game_no = 1;
        while (true) {
            const bool tiebreak = games_.p1 == 6 && games_.p2 == 6;
            const bool final_set = sets_.p1 == p_.sets_to_win - 1 && sets_.p2 == p_.sets_to_win - 1;
            const Player winner = play_game(m, set_no, game_no, game_server, tiebreak, final_set ? 10 : 7);
            ++games_[winner];
            game_server = opponent(game_server);
            ++game_no;
            const int w = games_[winner];
            const int l = games_[opponent(winner)];
            if ((w >= 6 && w - l >= 2) || tiebreak) {
                ++sets_[winner];
                m.points.back().set_victor = static_cast<Victor>(winner);
                return;
            }
        }
    }

    Player play_game(MatchData& m, int set_no, int game_no, Player game_server, bool tiebreak, int target)
    {
        PerPlayer<int> raw{};
        int played = 0;
        while (true) {
            Player server = game_server;
            if (tiebreak) {
                // First point by the game server, then alternate every two points.
                server = ((played + 1) / 2) % 2 == 0 ? game_server : opponent(game_server);
            }
            PointRecord rec;
            rec.match_id = p_.match_id;
            rec.player1 = p_.players.p1;
            rec.player2 = p_.players.p2;
            rec.set_no = set_no;
            rec.game_no = game_no;
            rec.point_no = static_cast<int>(m.points.size()) + 1;
            rec.sets = sets_;
            rec.games = games_;
            rec.score = tiebreak ? raw : game_display(raw.p1, raw.p2);
            rec.server = server;

            const Player returner = opponent(server);
            if (!tiebreak) {
                const int rs = raw[returner];
                const int ss = raw[server];
                rec.break_pt[returner] = rs >= 3 && rs > ss;
            }

            const Player won = play_point(rec);
            ++raw[won];
            ++played;
            if (rec.break_pt[returner]) {
                rec.break_pt_won[returner] = won == returner;
                rec.break_pt_missed[returner] = won != returner;
            }

            const int goal = tiebreak ? target : 4;
            const bool over = raw[won] >= goal && raw[won] - raw[opponent(won)] >= 2;
            if (over) rec.game_victor = static_cast<Victor>(won);
            m.points.push_back(std::move(rec));
            if (over) return won;
        }
    }

    double advantage(Player p) const { return p_.momentum * (p == Player::P1 ? form_ : -form_); }

    Player play_point(PointRecord& rec)
    {
        const Player server = rec.server;
        const Player returner = opponent(server);
        const double adv = advantage(server);

        const bool first_in = rng_.bernoulli(p_.first_serve_in);
        rec.serve_no = first_in ? ServeNo::First : ServeNo::Second;
        const bool double_fault = !first_in && rng_.bernoulli(tilt(0.07, -adv));

        Player won = returner;
        bool ace = false;
        if (!double_fault) {
            const double p_win = tilt(first_in ? p_.first_serve_win : p_.second_serve_win, adv);
            won = rng_.bernoulli(p_win) ? server : returner;
            if (won == server) ace = rng_.bernoulli(tilt(first_in ? 0.16 : 0.03, 0.8 * adv));
        }
        const Player lost = opponent(won);

        rec.point_victor = static_cast<Victor>(won);
        rec.points_won = prev_points_;
        ++rec.points_won[won];
        prev_points_ = rec.points_won;
        rec.ace[server] = ace;
        rec.double_fault[server] = double_fault;

        const bool rally = !ace && !double_fault;
        rec.rally_count = ace ? 1 : double_fault ? 0 : 2 + static_cast<int>(-std::log(1.0 - rng_.uniform()) * 3.5);
        if (rally) {
            if (rng_.bernoulli(tilt(0.32, 0.6 * advantage(won)))) {
                rec.winner[won] = true;
                rec.winner_shot_type = rng_.bernoulli(tilt(0.62, 0.3 * advantage(won))) ? ShotType::Forehand
                                                                                          : ShotType::Backhand;
            } else if (rng_.bernoulli(tilt(0.5, -0.6 * advantage(lost)))) {
                rec.unf_err[lost] = true;
            }
            if (rng_.bernoulli(0.13)) {
                const Player at_net = rng_.bernoulli(0.6) ? won : lost;
                rec.net_pt[at_net] = true;
                rec.net_pt_won[at_net] = at_net == won;
            }
        }

        for (Player p : {Player::P1, Player::P2}) {
            double d = 0.0;
            if (rally) {
                d = rec.rally_count * (3.0 + 3.0 * rng_.uniform()) * std::exp(-0.35 * advantage(p));
                if (p == lost) d *= 1.15;
            } else {
                d = 0.5 + 2.5 * rng_.uniform();
            }
            rec.distance_run[p] = std::round(d * 1000.0) / 1000.0;
        }

        if (!rng_.bernoulli(p_.speed_missing)) {
            const double base = first_in ? 117.0 : 97.0;
            rec.speed_mph = std::round(base + 5.0 * rng_.normal() + 2.0 * adv);
        }
        if (!double_fault) {
            static constexpr ServeWidth kWidths[] = {ServeWidth::B, ServeWidth::BC, ServeWidth::BW, ServeWidth::C,
                                                     ServeWidth::W};
            rec.serve_width = kWidths[rng_.below(5)];
            rec.serve_depth = rng_.bernoulli(tilt(0.4, 0.5 * adv)) ? ServeDepth::CTL : ServeDepth::NCTL;
        }
        if (rally) {
            rec.return_depth = rng_.bernoulli(tilt(0.45, 0.5 * advantage(returner))) ? ReturnDepth::D
                                                                                      : ReturnDepth::ND;
        }

        elapsed_ += 25.0 + 3.0 * rec.rally_count;
        rec.extras = {clock(elapsed_)};

        form_ = p_.persistence * form_ + p_.form_noise * rng_.normal()
              + p_.feedback * (won == Player::P1 ? 1.0 : -1.0);
        return won;
    }

    SimulationParams p_;
    Rng rng_;
    PerPlayer<int> sets_{};
    PerPlayer<int> games_{};
    PerPlayer<int> prev_points_{};
    double form_ = 0.0;
    double elapsed_ = 0.0;
};

} // namespace

MatchData simulate_match(const SimulationParams& params) { return MatchSimulator(params).run(); }

const std::vector<std::string>& extra_columns()
{
    static const std::vector<std::string> kExtras = {"elapsed_time"};
    return kExtras;
}

std::vector<MatchData> simulate_tournament(const std::string& prefix, int count, double momentum, std::uint64_t seed)
{
    std::vector<MatchData> out;
    for (int i = 0; i < count; ++i) {
        SimulationParams p;
        char id[16];
        std::snprintf(id, sizeof id, "%04d", i + 1);
        p.match_id = prefix + "-" + id;
        p.players = {"Player " + std::to_string(2 * i + 1), "Player " + std::to_string(2 * i + 2)};
        p.momentum = momentum;
        p.seed = splitmix64(seed + static_cast<std::uint64_t>(i));
        out.push_back(simulate_match(p));
    }
    return out;
}

} // namespace tennis::synthetic
