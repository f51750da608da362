// Acceptance harness: one line per criterion, non-zero exit on any FAIL.
//
// TENNIS_FULL_DATA      full point-by-point CSV (criteria 4, 7, 9, 10, 11)
// TENNIS_EXTERNAL_DATA  colon-separated external tournament CSVs (criterion 11)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tennis/attribution.hpp"
#include "tennis/momentum.hpp"
#include "tennis/pipeline.hpp"
#include "tennis/relational.hpp"
#include "tennis/rng.hpp"
#include "tennis/stats.hpp"
#include "tennis/synthetic.hpp"
#include "tennis/weighting.hpp"

using namespace tennis;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

Verdict pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Verdict skip(std::string d) { return {Outcome::Skip, std::move(d)}; }

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::optional<fs::path> env_path(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return fs::path(v);
}

std::vector<fs::path> env_paths(const char* name)
{
    std::vector<fs::path> out;
    const char* v = std::getenv(name);
    if (!v) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) {
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

std::vector<MatchData> sample_matches()
{
    return load_inputs(std::vector<fs::path>{TENNIS_SAMPLE_CSV}, SchemaMode::Strict).matches;
}

std::vector<MatchData> full_matches(const fs::path& p)
{
    return load_inputs(std::vector<fs::path>{p}, SchemaMode::Lenient).matches;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------

Verdict weight_sanity()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Matrix> fixtures;
    const auto matches = sample_matches();
    const auto specs = default_indicator_specs();
    std::vector<Direction> dirs;
    for (const auto& s : specs) dirs.push_back(s.direction);
    for (const auto& m : matches) {
        for (Player p : {Player::P1, Player::P2}) fixtures.push_back(compute_indicators(m, p, specs).rows);
    }
    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        Matrix x(2 + rng.below(40), specs.size());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform() * 5.0;
        }
        fixtures.push_back(x);
    }
    for (const auto& x : fixtures) {
        const auto raw = entropy_weights(normalize_minmax(x, dirs));
        double total = 0.0;
        for (std::size_t j = 0; j < raw.raw_weights.size(); ++j) {
            if (raw.raw_weights[j] < 0.0) return fail("negative weight");
            if (raw.raw_entropy[j] < 0.0 || raw.raw_entropy[j] > 1.0) return fail("entropy outside [0,1]");
            total += raw.raw_weights[j];
        }
        if (std::abs(total - 1.0) > 1e-9) return fail("weights sum to " + fmt(total));
        for (double xi : {0.05, 0.1, 0.15}) {
            const auto adj = apply_serve_factor(raw, xi);
            if (!(adj.adjusted[0] > raw.raw_weights[0])) return fail("serve factor did not raise X1");
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 1.0) return fail("runtime " + fmt(secs) + " s");
    return pass(std::to_string(fixtures.size()) + " fixtures, " + fmt(secs) + " s");
}

// 2 -------------------------------------------------------------------------

Verdict oracle_equivalence()
{
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(11), m = 1 + rng.below(5);
        oracle::Rows rows(n, std::vector<double>(m));
        Matrix x(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) rows[i][j] = x(i, j) = rng.uniform() * 20.0 - 5.0;
        }
        std::vector<Direction> dirs(m, Direction::Benefit);
        std::vector<bool> cost(m, false);
        for (std::size_t j = 0; j < m; ++j) {
            if (rng.bernoulli(0.3)) {
                dirs[j] = Direction::Cost;
                cost[j] = true;
            }
        }
        const double xi = 0.05 + 0.1 * rng.uniform();
        const auto w = apply_serve_factor(entropy_weights(normalize_minmax(x, dirs)), xi);
        const auto o = oracle::ewm(rows, cost, kDefaultEpsilon, xi);
        for (std::size_t j = 0; j < m; ++j) {
            worst = std::max({worst, std::abs(w.raw_entropy[j] - o.entropy[j]), std::abs(w.raw_weights[j] - o.raw[j]),
                              std::abs(w.adjusted[j] - o.adjusted[j])});
        }

        // Grey relation on strictly positive data.
        std::vector<double> ref(n);
        for (std::size_t i = 0; i < n; ++i) {
            ref[i] = 0.05 + rng.uniform();
            for (std::size_t j = 0; j < m; ++j) rows[i][j] = x(i, j) = 0.05 + rng.uniform();
        }
        const double rho = 0.05 + 0.9 * rng.uniform();
        const auto g = grey_relation(ref, x, w.adjusted, rho);
        const auto og = oracle::gra(ref, rows, w.adjusted, rho);
        worst = std::max({worst, std::abs(g.ma - og.ma), std::abs(g.mi - og.mi)});
        for (std::size_t j = 0; j < m; ++j) {
            worst = std::max(worst, std::abs(g.degrees[j] - og.degree[j]));
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max({worst, std::abs(g.delta(i, j) - og.delta[i][j]),
                                  std::abs(g.coefficients(i, j) - og.gamma[i][j])});
            }
        }
    }
    if (worst > 1e-9) return fail("max deviation " + fmt(worst));
    return pass("100 matrices, max deviation " + fmt(worst));
}

// 3 -------------------------------------------------------------------------

Verdict ema_properties()
{
    Rng rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<double> y(n);
        for (double& v : y) v = rng.uniform() * 2.0 - 1.0;
        const double alpha = 0.05 + 0.95 * rng.uniform();
        const int period = 1 + static_cast<int>(rng.below(15));
        const auto base = ema(y, alpha, period).values;

        const double c = rng.uniform() * 4.0 - 2.0;
        for (double v : ema(std::vector<double>(n, c), alpha, period).values) worst = std::max(worst, std::abs(v - c));

        const double a = 0.5 + 1.5 * rng.uniform(), b = rng.uniform() * 2.0 - 1.0;
        std::vector<double> z(n);
        for (std::size_t t = 0; t < n; ++t) z[t] = a * y[t] + b;
        const auto shifted = ema(z, alpha, period).values;
        for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(shifted[t] - (a * base[t] + b)));

        const auto same = ema(y, 1.0, period).values;
        for (std::size_t t = 0; t < n; ++t) worst = std::max(worst, std::abs(same[t] - y[t]));

        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t lo = t + 1 >= static_cast<std::size_t>(period) ? t + 1 - period : 0;
            const auto [mn, mx] = std::minmax_element(y.begin() + lo, y.begin() + t + 1);
            if (base[t] < *mn - 1e-12 || base[t] > *mx + 1e-12) return fail("outside convex hull");
        }
    }
    if (worst > 1e-12) return fail("max deviation " + fmt(worst));
    return pass("1000 series, max deviation " + fmt(worst));
}

// 4 -------------------------------------------------------------------------

Verdict non_randomness()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto full = env_path("TENNIS_FULL_DATA");
    const auto matches = full ? full_matches(*full) : sample_matches();
    NullSimConfig cfg;
    cfg.n_datasets = 1000;
    cfg.seed = 42;
    const ScoringParams params;
    const auto real = validate_momentum(matches, cfg, params, 0.05).report;
    std::string detail = std::string(full ? "full data" : "sample") + ": p_mwu " + fmt(real.p_mwu) + ", p_ks "
                       + fmt(real.p_ks);
    const bool real_ok = real.reject_mwu && real.reject_ks;

    int quiet = 0;
    for (int run = 0; run < 100; ++run) {
        const auto control = synthetic::simulate_tournament("control", 2, 0.0, 1000 + run);
        NullSimConfig c = cfg;
        c.seed = 42 + run;
        const auto r = validate_momentum(control, c, params, 0.05).report;
        quiet += !r.reject_mwu && !r.reject_ks;
    }
    const double secs = seconds_since(t0);
    detail += "; control quiet in " + std::to_string(quiet) + "/100; " + fmt(secs) + " s";
    if (!real_ok || quiet < 90 || secs >= 300.0) return fail(detail);
    return pass(detail);
}

// 5 -------------------------------------------------------------------------

Verdict test_exactness()
{
    Rng rng(5);
    double worst_p = 0.0, worst_d = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n1 = 1 + rng.below(11);
        const std::size_t n2 = 1 + rng.below(12 - n1);
        const std::uint64_t levels = trial % 3 == 0 ? 3 : 1000;
        std::vector<double> x(n1), y(n2);
        for (double& v : x) v = static_cast<double>(rng.below(levels));
        for (double& v : y) v = static_cast<double>(rng.below(levels));
        worst_p = std::max(worst_p, std::abs(mann_whitney_u(x, y).p - oracle::mann_whitney_p(x, y)));
        worst_d = std::max(worst_d, std::abs(ks_two_sample(x, y).d - oracle::ks_d(x, y)));
    }
    if (worst_p > 1e-12 || worst_d > 1e-12) return fail("p dev " + fmt(worst_p) + ", D dev " + fmt(worst_d));
    return pass("300 samples, p dev " + fmt(worst_p) + ", D dev " + fmt(worst_d));
}

// 6 -------------------------------------------------------------------------

/// Rows of `rows` that reach `node`.
std::vector<std::size_t> reaching(const Tree& t, int node, const Matrix& x, std::vector<std::size_t> rows, int at = 0)
{
    if (at == node) return rows;
    const auto& nd = t.nodes[static_cast<std::size_t>(at)];
    if (nd.is_leaf()) return {};
    std::vector<std::size_t> l, r;
    for (auto i : rows) (x(i, static_cast<std::size_t>(nd.feature)) < nd.threshold ? l : r).push_back(i);
    auto found = reaching(t, node, x, l, nd.left);
    if (!found.empty()) return found;
    return reaching(t, node, x, r, nd.right);
}

Verdict boosting_oracle()
{
    Rng rng(6);
    int checked_nodes = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(7), d = 1 + rng.below(2);
        Matrix x(n, d);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = static_cast<double>(rng.below(5));
            y[i] = rng.uniform() * 4.0 - 2.0;
        }
        BoostParams p;
        p.n_rounds = 1;
        p.max_depth = 1 + static_cast<int>(rng.below(2));
        p.lambda = rng.uniform();
        p.min_child_weight = 1.0;
        p.learning_rate = 1.0;
        const auto model = train(x, y, p);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = model.base_score - y[i];
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;

        const auto& tree = model.trees.at(0);
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            const auto rows = reaching(tree, static_cast<int>(k), x, all);
            std::vector<std::vector<double>> xs;
            std::vector<double> gs;
            for (auto i : rows) {
                xs.emplace_back(x.row(i).begin(), x.row(i).end());
                gs.push_back(g[i]);
            }
            const double best = xs.empty() ? -INFINITY : oracle::best_gain(xs, gs, p.lambda, p.gamma, p.min_child_weight);
            const auto& nd = tree.nodes[k];
            int depth = 0;
            for (std::size_t c = k; c != 0;) {
                for (std::size_t q = 0; q < tree.nodes.size(); ++q) {
                    if (tree.nodes[q].left == static_cast<int>(c) || tree.nodes[q].right == static_cast<int>(c)) {
                        c = q;
                        break;
                    }
                }
                ++depth;
            }
            if (nd.is_leaf()) {
                if (depth < p.max_depth && best > 1e-9)
                    return fail("trial " + std::to_string(trial) + ": leaf where a split gains " + fmt(best));
            } else {
                ++checked_nodes;
                if (std::abs(nd.gain - best) > 1e-9)
                    return fail("trial " + std::to_string(trial) + ": gain " + fmt(nd.gain) + " vs " + fmt(best));
            }
        }
    }

    Rng big(7);
    Matrix x(300, 4);
    std::vector<double> y(300);
    for (std::size_t i = 0; i < 300; ++i) {
        for (std::size_t j = 0; j < 4; ++j) x(i, j) = big.uniform();
        y[i] = std::sin(5.0 * x(i, 0)) + x(i, 1) * x(i, 2) + 0.1 * big.uniform();
    }
    BoostParams p;
    p.n_rounds = 60;
    p.subsample = 0.8;
    std::vector<double> rmse;
    const auto a = train(x, y, p, {}, &rmse);
    for (std::size_t r = 1; r < rmse.size(); ++r) {
        if (rmse[r] > rmse[r - 1]) return fail("train RMSE rose at round " + std::to_string(r));
    }
    const auto b = train(x, y, p);
    if (!(a.trees == b.trees) || predict(a, x) != predict(b, x)) return fail("seeded runs differ");
    return pass("200 instances, " + std::to_string(checked_nodes) + " splits checked; RMSE monotone; deterministic");
}

// 7 -------------------------------------------------------------------------

double held_out_r2(const std::vector<MatchData>& matches, EvalReport* report = nullptr)
{
    const auto frame = frame_for(matches, ScoringParams{}, PlayerView::Both);
    const auto [model, eval] = fit(frame, BoostParams{}, SplitSpec{});
    if (report) *report = eval;
    return eval.test.r2;
}

Verdict prediction_quality()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double sample = held_out_r2(sample_matches());
    std::string detail = "sample R2 " + fmt(sample);
    bool ok = sample >= 0.80;
    if (const auto full = env_path("TENNIS_FULL_DATA")) {
        const double r2 = held_out_r2(full_matches(*full));
        detail += ", full R2 " + fmt(r2);
        ok = ok && r2 >= 0.95;
    } else {
        detail += "; full-data part not run (TENNIS_FULL_DATA unset)";
    }
    const double secs = seconds_since(t0);
    detail += "; " + fmt(secs) + " s";
    if (secs >= 120.0) ok = false;
    return ok ? pass(detail) : fail(detail);
}

// 8 -------------------------------------------------------------------------

Verdict shap_correctness()
{
    Rng rng(8);
    double worst_local = 0.0, worst_brute = 0.0;
    int unused_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + rng.below(3);
        const std::size_t n = 20 + rng.below(40);
        Matrix x(n + 1, d + 1);
        std::vector<double> y(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = std::floor(rng.uniform() * 6.0);
            x(i, d) = 3.0;  // never split on
            y[i] = x(i, 0) * x(i, 1) - 0.5 * x(i, d - 1) + rng.uniform();
        }
        BoostParams p;
        p.n_rounds = 1 + static_cast<int>(rng.below(5));
        p.max_depth = 1 + static_cast<int>(rng.below(3));
        p.learning_rate = 0.2 + 0.8 * rng.uniform();
        const auto model = train(x, y, p);
        const auto shap = tree_shap(model, x);
        for (std::size_t i = 0; i <= n; ++i) {
            const std::vector<double> row(x.row(i).begin(), x.row(i).end());
            double total = shap.base_value;
            for (std::size_t j = 0; j <= d; ++j) total += shap.values(i, j);
            worst_local = std::max(worst_local, std::abs(total - predict_row(model, row)));
            if (shap.values(i, d) != 0.0) return fail("unused feature has nonzero attribution");
            ++unused_checked;
            if (i < 5) {
                const auto phi = oracle::shapley(model, row);
                for (std::size_t j = 0; j <= d; ++j) worst_brute = std::max(worst_brute, std::abs(phi[j] - shap.values(i, j)));
            }
        }
    }
    // Local accuracy on the sample model too.
    const auto frame = frame_for(sample_matches(), ScoringParams{}, PlayerView::Both);
    BoostParams p;
    p.n_rounds = 50;
    const auto model = train(frame.rows, frame.target, p, frame.names);
    const auto shap = tree_shap(model, frame.rows);
    const auto pred = predict(model, frame.rows);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        double total = shap.base_value;
        for (std::size_t j = 0; j < frame.names.size(); ++j) total += shap.values(i, j);
        worst_local = std::max(worst_local, std::abs(total - pred[i]));
    }
    const std::string detail = "local " + fmt(worst_local) + ", brute force " + fmt(worst_brute) + ", "
                             + std::to_string(unused_checked) + " unused-feature rows";
    if (worst_local > 1e-9 || worst_brute > 1e-9) return fail(detail);
    return pass(detail);
}

// 9 -------------------------------------------------------------------------

Verdict importance_ranking()
{
    const auto full = env_path("TENNIS_FULL_DATA");
    if (!full) return skip("needs TENNIS_FULL_DATA");
    const auto frame = frame_for(full_matches(*full), ScoringParams{}, PlayerView::Both);
    const auto [model, eval] = fit(frame, BoostParams{}, SplitSpec{});
    const auto rank = importance(tree_shap(model, frame.rows)).ranking;
    int found = 0;
    std::string top;
    for (std::size_t k = 0; k < std::min<std::size_t>(5, rank.size()); ++k) {
        top += (k ? "," : "") + rank[k].first;
        found += rank[k].first == "distance_run" || rank[k].first == "opponent_distance_run";
    }
    return found == 2 ? pass("top 5: " + top) : fail("top 5: " + top);
}

// 10 ------------------------------------------------------------------------

Verdict stability()
{
    std::vector<MatchData> matches = sample_matches();
    if (const auto full = env_path("TENNIS_FULL_DATA")) matches = full_matches(*full);
    const RunConfig defaults;
    double worst_range = 0.0, worst_var = 0.0;
    std::size_t cases = 0;
    for (const auto& m : matches) {
        for (Player p : {Player::P1, Player::P2}) {
            const auto r = stability_sweep(matches, ScoringParams{}, defaults.xi_grid, m.match_id, p);
            worst_range = std::max(worst_range, r.range_of_output);
            worst_var = std::max(worst_var, r.variance_of_differences);
            ++cases;
        }
    }
    const std::string detail = std::to_string(cases) + " match-players, max range " + fmt(worst_range)
                             + ", max variance " + fmt(worst_var);
    return worst_range <= 0.05 && worst_var <= 0.005 ? pass(detail) : fail(detail);
}

// 11 ------------------------------------------------------------------------

Verdict generalization()
{
    const auto external = env_paths("TENNIS_EXTERNAL_DATA");
    if (external.empty()) {
        const auto r = generalize(ModelFile{}, std::vector<fs::path>{});
        if (!r.datasets.empty()) return fail("datasets reported without input");
        return pass("0 datasets (TENNIS_EXTERNAL_DATA unset)");
    }
    const auto full = env_path("TENNIS_FULL_DATA");
    const auto matches = full ? full_matches(*full) : sample_matches();
    const auto frame = frame_for(matches, ScoringParams{}, PlayerView::Both);
    const auto [model, eval] = fit(frame, BoostParams{}, SplitSpec{});
    const auto r = generalize(ModelFile{model, ScoringParams{}, PlayerView::Both}, external);
    bool ok = true;
    std::string detail = "in-domain " + fmt(eval.test.r2);
    for (const auto& e : r.datasets) {
        detail += "; " + e.name + " " + fmt(e.metrics.r2);
        ok = ok && e.metrics.r2 >= 0.80 && e.metrics.r2 <= eval.test.r2;
    }
    return ok ? pass(detail) : fail(detail);
}

} // namespace

int main()
{
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
        {1, weight_sanity},      {2, oracle_equivalence}, {3, ema_properties},     {4, non_randomness},
        {5, test_exactness},     {6, boosting_oracle},    {7, prediction_quality}, {8, shap_correctness},
        {9, importance_ranking}, {10, stability},         {11, generalization},
    };
    int failures = 0;
    for (const auto& [id, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = fail(std::string("exception: ") + e.what());
        }
        const char* word = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::Fail;
        std::cout << "criterion " << id << ": " << word << " - " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
