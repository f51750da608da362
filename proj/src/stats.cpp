#include "tennis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "tennis/error.hpp"
#include "tennis/rng.hpp"

namespace tennis {

namespace {

struct Ranked {
    std::vector<double> ranks;  ///< midranks, pooled order x then y
    double tie_term = 0.0;      ///< sum over tie groups of t^3 - t
};

Ranked midranks(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size() + y.size();
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pooled[a] < pooled[b]; });

    Ranked r;
    r.ranks.resize(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r.ranks[order[k]] = mid;
        const double t = static_cast<double>(j - i + 1);
        r.tie_term += t * t * t - t;
        i = j + 1;
    }
    return r;
}

/// Two-sided exact p: the share of size-n1 subsets of the pooled midranks
/// whose U1 is at least as far from n1*n2/2 as the observed one. Ranks are
/// doubled so all arithmetic stays integral.
double exact_mwu_p(const std::vector<double>& ranks, std::size_t n1, std::size_t n2, double u1)
{
    const std::size_t n = ranks.size();
    std::vector<int> doubled(n);
    int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
        total += doubled[i];
    }
    // counts[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<double>> counts(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
    counts[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(doubled[i]);
        for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
            for (std::size_t s = static_cast<std::size_t>(total); s >= r; --s) {
                counts[k][s] += counts[k - 1][s - r];
                if (s == r) break;
            }
        }
    }
    const long long nn = static_cast<long long>(n1 * n2);
    const long long base = 2 * nn + static_cast<long long>(n1 * (n1 + 1));
    const long long observed = std::llabs(std::llround(2.0 * u1) - nn);
    double extreme = 0.0;
    double all = 0.0;
    for (std::size_t s = 0; s <= static_cast<std::size_t>(total); ++s) {
        const double c = counts[n1][s];
        if (c == 0.0) continue;
        all += c;
        const long long dev = std::llabs(base - static_cast<long long>(s) - nn);
        if (dev >= observed) extreme += c;
    }
    return std::min(1.0, extreme / all);
}

} // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y)
{
    if (x.empty() || y.empty()) {
        throw Error(Errc::EmptySeries, "Mann-Whitney U needs two non-empty samples");
    }
    const auto n1 = static_cast<double>(x.size());
    const auto n2 = static_cast<double>(y.size());
    const auto ranked = midranks(x, y);

    MannWhitneyResult res;
    res.r1 = std::accumulate(ranked.ranks.begin(), ranked.ranks.begin() + static_cast<std::ptrdiff_t>(x.size()), 0.0);
    res.r2 = std::accumulate(ranked.ranks.begin() + static_cast<std::ptrdiff_t>(x.size()), ranked.ranks.end(), 0.0);
    res.u1 = n1 * n2 + n1 * (n1 + 1.0) / 2.0 - res.r1;
    res.u2 = n1 * n2 + n2 * (n2 + 1.0) / 2.0 - res.r2;
    res.u = std::min(res.u1, res.u2);

    const double n = n1 + n2;
    if (ranked.tie_term == n * n * n - n) {
        // Every value identical.
        res.p = 1.0;
        res.exact = x.size() + y.size() <= kExactMannWhitneyLimit;
        return res;
    }
    if (x.size() + y.size() <= kExactMannWhitneyLimit) {
        res.exact = true;
        res.p = exact_mwu_p(ranked.ranks, x.size(), y.size(), res.u1);
        return res;
    }
    const double mean = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) {
        res.p = 1.0;
        return res;
    }
    const double z = std::max(0.0, std::abs(res.u1 - mean) - 0.5) / std::sqrt(var);
    res.p = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
    return res;
}

double kolmogorov_survival(double lambda)
{
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 1.18) {
        // Theta-function form converges fast for small lambda.
        const double l2 = lambda * lambda;
        double sum = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double odd = 2.0 * k - 1.0;
            sum += std::exp(-odd * odd * std::numbers::pi * std::numbers::pi / (8.0 * l2));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(double alpha, std::size_t n1, std::size_t n2)
{
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const auto a = static_cast<double>(n1);
    const auto b = static_cast<double>(n2);
    return c * std::sqrt((a + b) / (a * b));
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y)
{
    if (x.empty() || y.empty()) {
        throw Error(Errc::EmptySeries, "KS test needs two non-empty samples");
    }
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());

    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult res;
    res.d = d;
    const double ne = na * nb / (na + nb);
    res.p = kolmogorov_survival(std::sqrt(ne) * d);
    return res;
}

TestReport compare_samples(std::span<const double> real, std::span<const double> simulated, double alpha_level)
{
    const auto mwu = mann_whitney_u(real, simulated);
    const auto ks = ks_two_sample(real, simulated);
    TestReport r;
    r.u_stat = mwu.u;
    r.r1 = mwu.r1;
    r.r2 = mwu.r2;
    r.d_stat = ks.d;
    r.p_mwu = mwu.p;
    r.p_ks = ks.p;
    r.n1 = real.size();
    r.n2 = simulated.size();
    r.alpha_level = alpha_level;
    r.ks_critical = ks_critical_value(alpha_level, r.n1, r.n2);
    r.reject_mwu = mwu.p < alpha_level;
    r.reject_ks = ks.p < alpha_level;
    return r;
}

const char* to_string(NullScheme s) noexcept
{
    return s == NullScheme::ShufflePoints ? "shuffle_points" : "iid_resample";
}

NullScheme null_scheme_from_string(const std::string& s)
{
    if (s == "shuffle_points") return NullScheme::ShufflePoints;
    if (s == "iid_resample") return NullScheme::IidResample;
    throw Error(Errc::InvalidArgument, "unknown null scheme '" + s + "'");
}

double lag1_autocorrelation(std::span<const double> series)
{
    const std::size_t n = series.size();
    if (n < 3) return 0.0;
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double c = series[t] - mean;
        den += c * c;
        if (t + 1 < n) num += c * (series[t + 1] - mean);
    }
    if (!(den > 0.0)) return 0.0;
    return std::abs(num / den);
}

std::vector<double> momentum_summaries(const ScoreResult& scores)
{
    std::vector<double> out;
    out.reserve(2 * scores.matches.size());
    for (const auto& m : scores.matches) {
        out.push_back(lag1_autocorrelation(m.momentum.p1.values));
        out.push_back(lag1_autocorrelation(m.momentum.p2.values));
    }
    return out;
}

std::vector<MatchData> null_dataset(std::span<const MatchData> matches, NullScheme scheme, std::uint64_t seed,
                                    std::uint64_t index)
{
    Rng rng = Rng::stream(seed, index);
    std::vector<MatchData> out(matches.begin(), matches.end());
    for (auto& m : out) {
        // Records move only between slots served by the same player; each slot
        // keeps its position in the scoreboard.
        for (Player server : {Player::P1, Player::P2}) {
            std::vector<std::size_t> slots;
            for (std::size_t i = 0; i < m.points.size(); ++i) {
                if (m.points[i].server == server) slots.push_back(i);
            }
            std::vector<PointRecord> pool;
            pool.reserve(slots.size());
            for (auto i : slots) pool.push_back(m.points[i]);
            std::vector<PointRecord> drawn;
            if (scheme == NullScheme::ShufflePoints) {
                drawn = pool;
                rng.shuffle(std::span<PointRecord>(drawn));
            } else {
                drawn.reserve(pool.size());
                for (std::size_t k = 0; k < pool.size(); ++k) {
                    drawn.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
                }
            }
            for (std::size_t k = 0; k < slots.size(); ++k) {
                const PointRecord& at = m.points[slots[k]];
                PointRecord r = std::move(drawn[k]);
                r.point_no = at.point_no;
                r.set_no = at.set_no;
                r.game_no = at.game_no;
                r.sets = at.sets;
                r.games = at.games;
                r.score = at.score;
                m.points[slots[k]] = std::move(r);
            }
        }
    }
    return out;
}

std::vector<double> simulate_null(std::span<const MatchData> matches, const NullSimConfig& cfg,
                                  const ScoringParams& params)
{
    if (matches.empty()) throw Error(Errc::EmptyMatrix, "null simulation needs at least one match");
    if (cfg.n_datasets < 1) throw Error(Errc::InvalidArgument, "n_datasets must be >= 1");
    check_params(params);

    const auto replicates = static_cast<std::size_t>(cfg.n_datasets);
    const std::size_t units = 2 * matches.size();
    std::vector<double> out(replicates, 0.0);

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, replicates));

    const auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto data = null_dataset(matches, cfg.scheme, cfg.seed, r);
            const auto scores = score_matches(data, params);
            const std::size_t unit = r % units;
            const auto& m = scores.matches[unit / 2];
            out[r] = lag1_autocorrelation(unit % 2 == 0 ? m.momentum.p1.values : m.momentum.p2.values);
        }
    };

    if (workers <= 1) {
        run(0, replicates);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (replicates + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(replicates, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                run(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

MomentumValidation validate_momentum(std::span<const MatchData> matches, const NullSimConfig& cfg,
                                     const ScoringParams& params, double alpha_level)
{
    MomentumValidation v;
    v.config = cfg;
    v.real = momentum_summaries(score_matches(matches, params));
    v.simulated = simulate_null(matches, cfg, params);
    v.report = compare_samples(v.real, v.simulated, alpha_level);
    return v;
}

} // namespace tennis
