#include "tennis/scoring.hpp"

#include <algorithm>

#include "tennis/error.hpp"

namespace tennis {

const char* to_string(Scope s) noexcept { return s == Scope::Tournament ? "tournament" : "match"; }

Scope scope_from_string(const std::string& s)
{
    if (s == "tournament") return Scope::Tournament;
    if (s == "match") return Scope::Match;
    throw Error(Errc::InvalidArgument, "unknown scope '" + s + "'");
}

void check_params(const ScoringParams& p)
{
    if (!(p.xi >= kMinServeFactor && p.xi <= kMaxServeFactor)) {
        throw Error(Errc::XiOutOfRange, "xi = " + std::to_string(p.xi) + " outside [0.05, 0.15]");
    }
    if (!(p.rho > 0.0 && p.rho < 1.0)) throw Error(Errc::InvalidArgument, "rho must lie in (0, 1)");
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in [0, 1]");
    if (p.window < 1) throw Error(Errc::InvalidArgument, "window must be >= 1");
    if (p.ema_period < 1) throw Error(Errc::InvalidArgument, "ema_period must be >= 1");
    if (!(p.epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
}

ScopeScores score_indicator_scope(std::span<const IndicatorMatrix> matrices, std::span<const Direction> directions,
                                  const ScoringParams& params)
{
    if (matrices.empty()) {
        throw Error(Errc::EmptyMatrix, "no indicator matrices in scope");
    }
    const auto& ids = matrices.front().ids;
    Matrix stacked;
    std::vector<double> reference;
    for (const auto& m : matrices) {
        if (m.ids != ids) throw Error(Errc::LayoutMismatch, "indicator layouts differ within scope");
        for (std::size_t t = 0; t < m.rows.rows(); ++t) stacked.append_row(m.rows.row(t));
        reference.insert(reference.end(), m.reference.begin(), m.reference.end());
    }

    ScopeScores out;
    out.scaler = MinMaxScaler::fit(stacked, directions, params.epsilon);
    const Matrix normalized = out.scaler.transform(stacked);

    const auto serve = std::find(ids.begin(), ids.end(), IndicatorId::X1);
    if (serve == ids.end()) throw Error(Errc::LayoutMismatch, "serve advantage indicator X1 missing");
    out.weights = apply_serve_factor(entropy_weights(normalized, params.epsilon), params.xi,
                                     static_cast<std::size_t>(serve - ids.begin()));

    const Matrix ref_column = [&] {
        Matrix r(reference.size(), 1);
        for (std::size_t i = 0; i < reference.size(); ++i) r(i, 0) = reference[i];
        return r;
    }();
    const Direction benefit[] = {Direction::Benefit};
    out.reference_scaler = MinMaxScaler::fit(ref_column, benefit, params.epsilon);
    std::vector<double> ref_norm(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) ref_norm[i] = out.reference_scaler.apply(0, reference[i]);

    out.grey = grey_relation(ref_norm, normalized, out.weights.adjusted, params.rho);

    std::size_t offset = 0;
    for (const auto& m : matrices) {
        IndicatorMatrix local = m;
        for (std::size_t t = 0; t < m.rows.rows(); ++t) {
            auto dst = local.rows.row(t);
            auto src = normalized.row(offset + t);
            std::copy(src.begin(), src.end(), dst.begin());
        }
        offset += m.rows.rows();
        auto perf = performance_score(local, out.grey.degrees, params.window);
        auto mom = ema(perf.scores, params.alpha, params.ema_period);
        mom.player = perf.player;
        mom.match_id = perf.match_id;
        mom.point_no = perf.point_no;
        out.performance.push_back(std::move(perf));
        out.momentum.push_back(std::move(mom));
    }
    return out;
}

ScoreResult score_matches(std::span<const MatchData> matches, const ScoringParams& params)
{
    check_params(params);
    if (matches.empty()) throw Error(Errc::EmptyMatrix, "no matches to score");

    ScoreResult result;
    result.specs = default_indicator_specs(params.window);
    std::vector<Direction> directions;
    for (const auto& s : result.specs) directions.push_back(s.direction);

    result.matches.resize(matches.size());
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const auto& match = matches[i];
        auto specs = result.specs;
        const int n = static_cast<int>(match.points.size());
        for (auto& s : specs) s.window = std::min(s.window, std::max(n, 1));
        auto& ms = result.matches[i];
        ms.match_id = match.match_id;
        for (Player p : {Player::P1, Player::P2}) ms.indicators[p] = compute_indicators(match, p, specs);
    }

    std::vector<std::vector<std::size_t>> groups;
    if (params.scope == Scope::Tournament) {
        groups.emplace_back(matches.size());
        for (std::size_t i = 0; i < matches.size(); ++i) groups[0][i] = i;
    } else {
        for (std::size_t i = 0; i < matches.size(); ++i) groups.push_back({i});
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<IndicatorMatrix> mats;
        for (auto i : groups[g]) {
            mats.push_back(result.matches[i].indicators.p1);
            mats.push_back(result.matches[i].indicators.p2);
        }
        auto scope = score_indicator_scope(mats, directions, params);
        ScoreResult::ScopeSummary summary;
        summary.weights = scope.weights;
        summary.relation = scope.grey.relation;
        summary.degrees = scope.grey.degrees;
        summary.ma = scope.grey.ma;
        summary.mi = scope.grey.mi;
        for (std::size_t k = 0; k < groups[g].size(); ++k) {
            auto& ms = result.matches[groups[g][k]];
            summary.match_ids.push_back(ms.match_id);
            ms.scope = g;
            ms.performance.p1 = std::move(scope.performance[2 * k]);
            ms.performance.p2 = std::move(scope.performance[2 * k + 1]);
            ms.momentum.p1 = std::move(scope.momentum[2 * k]);
            ms.momentum.p2 = std::move(scope.momentum[2 * k + 1]);
        }
        result.scopes.push_back(std::move(summary));
    }
    return result;
}

} // namespace tennis
