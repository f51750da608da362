#include "tennis/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tennis/error.hpp"
#include "tennis/indicators.hpp"
#include "tennis/rng.hpp"

namespace tennis {

namespace {

double code(Victor v, Player focal)
{
    if (v == Victor::None) return 0.0;
    return won_by(v, focal) ? 1.0 : 2.0;
}

double flag(bool b) { return b ? 1.0 : 0.0; }

} // namespace

const char* to_string(PlayerView v) noexcept
{
    switch (v) {
    case PlayerView::P1: return "p1";
    case PlayerView::P2: return "p2";
    case PlayerView::Both: return "both";
    }
    return "both";
}

PlayerView player_view_from_string(const std::string& s)
{
    if (s == "p1") return PlayerView::P1;
    if (s == "p2") return PlayerView::P2;
    if (s == "both") return PlayerView::Both;
    throw Error(Errc::InvalidArgument, "unknown player view '" + s + "'");
}

const std::vector<std::string>& feature_names()
{
    static const std::vector<std::string> kNames = {
        "set_no",          "game_no",
        "point_no",        "sets",
        "opponent_sets",   "games",
        "opponent_games",  "score",
        "opponent_score",  "server",
        "serve_no",        "point_victor",
        "game_victor",     "set_victor",
        "points_won",      "opponent_points_won",
        "ace",             "opponent_ace",
        "winner",          "opponent_winner",
        "winner_shot_type", "double_fault",
        "opponent_double_fault", "unf_err",
        "opponent_unf_err", "net_pt",
        "opponent_net_pt", "net_pt_won",
        "opponent_net_pt_won", "break_pt",
        "opponent_break_pt", "break_pt_won",
        "opponent_break_pt_won", "break_pt_missed",
        "opponent_break_pt_missed", "distance_run",
        "opponent_distance_run", "rally_count",
        "speed_mph",       "serve_width",
        "serve_depth",     "return_depth",
    };
    return kNames;
}

const std::vector<CodeTable>& code_tables()
{
    static const std::vector<CodeTable> kTables = {
        {"score", {{"0", 0}, {"15", 1}, {"30", 2}, {"40", 3}, {"AD", 4}}},
        {"server", {{"focal", 1}, {"opponent", 2}}},
        {"serve_no", {{"first", 1}, {"second", 2}}},
        {"point_victor", {{"none", 0}, {"focal", 1}, {"opponent", 2}}},
        {"game_victor", {{"none", 0}, {"focal", 1}, {"opponent", 2}}},
        {"set_victor", {{"none", 0}, {"focal", 1}, {"opponent", 2}}},
        {"winner_shot_type", {{"none", 0}, {"F", 1}, {"B", 2}}},
        {"serve_width", {{"NA", 0}, {"B", 1}, {"BC", 2}, {"BW", 3}, {"C", 4}, {"W", 5}}},
        {"serve_depth", {{"NA", 0}, {"CTL", 1}, {"NCTL", 2}}},
        {"return_depth", {{"NA", 0}, {"D", 1}, {"ND", 2}}},
    };
    return kTables;
}

std::size_t FeatureFrame::feature_index(const std::string& name) const
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(Errc::UnknownFeature, "feature '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

FeatureFrame build_features(std::span<const MatchData> matches, std::span<const PerPlayer<MomentumSeries>> momentum,
                            PlayerView view)
{
    if (momentum.size() != matches.size()) {
        throw Error(Errc::MissingMomentum, "momentum given for " + std::to_string(momentum.size()) + " of "
                                               + std::to_string(matches.size()) + " matches");
    }
    FeatureFrame f;
    f.names = feature_names();
    f.rows = Matrix(0, f.names.size());
    std::vector<Player> views;
    if (view != PlayerView::P2) views.push_back(Player::P1);
    if (view != PlayerView::P1) views.push_back(Player::P2);

    std::vector<double> row(f.names.size());
    for (std::size_t m = 0; m < matches.size(); ++m) {
        const MatchData match = impute_speed(matches[m]);
        f.match_ids.push_back(match.match_id);
        for (Player p : views) {
            const auto& series = momentum[m][p].values;
            if (series.size() != match.points.size()) {
                throw Error(Errc::MissingMomentum, "match " + match.match_id + " player " + to_string(p) + ": "
                                                       + std::to_string(series.size()) + " momentum values for "
                                                       + std::to_string(match.points.size()) + " points");
            }
            const Player o = opponent(p);
            for (std::size_t t = 0; t < match.points.size(); ++t) {
                const auto& r = match.points[t];
                std::size_t j = 0;
                for (double v : {
                         double(r.set_no), double(r.game_no), double(r.point_no), double(r.sets[p]),
                         double(r.sets[o]), double(r.games[p]), double(r.games[o]), double(r.score[p]),
                         double(r.score[o]), r.server == p ? 1.0 : 2.0,
                         r.serve_no == ServeNo::First ? 1.0 : 2.0, code(r.point_victor, p), code(r.game_victor, p),
                         code(r.set_victor, p), double(r.points_won[p]), double(r.points_won[o]), flag(r.ace[p]),
                         flag(r.ace[o]), flag(r.winner[p]), flag(r.winner[o]),
                         static_cast<double>(static_cast<int>(r.winner_shot_type)), flag(r.double_fault[p]),
                         flag(r.double_fault[o]), flag(r.unf_err[p]), flag(r.unf_err[o]), flag(r.net_pt[p]),
                         flag(r.net_pt[o]), flag(r.net_pt_won[p]), flag(r.net_pt_won[o]), flag(r.break_pt[p]),
                         flag(r.break_pt[o]), flag(r.break_pt_won[p]), flag(r.break_pt_won[o]),
                         flag(r.break_pt_missed[p]), flag(r.break_pt_missed[o]), r.distance_run[p],
                         r.distance_run[o], double(r.rally_count), *r.speed_mph,
                         static_cast<double>(static_cast<int>(r.serve_width)),
                         static_cast<double>(static_cast<int>(r.serve_depth)),
                         static_cast<double>(static_cast<int>(r.return_depth)),
                     }) {
                    row[j++] = v;
                }
                f.rows.append_row(row);
                f.target.push_back(series[t]);
                f.match_index.push_back(m);
                f.point_no.push_back(r.point_no);
                f.view.push_back(p);
            }
        }
    }
    return f;
}

void check_params(const BoostParams& p)
{
    const auto bad = [](const std::string& what) { throw Error(Errc::InvalidArgument, what); };
    if (p.n_rounds < 0) bad("n_rounds must be >= 0");
    if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) bad("learning_rate must be in (0, 1]");
    if (p.max_depth < 0) bad("max_depth must be >= 0");
    if (!(p.lambda >= 0.0)) bad("lambda must be >= 0");
    if (!(p.gamma >= 0.0)) bad("gamma must be >= 0");
    if (!(p.min_child_weight >= 0.0)) bad("min_child_weight must be >= 0");
    if (!(p.subsample > 0.0 && p.subsample <= 1.0)) bad("subsample must be in (0, 1]");
    if (p.base_score && !std::isfinite(*p.base_score)) bad("base_score must be finite");
}

int Tree::leaf(std::span<const double> x) const
{
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        const double v = x[static_cast<std::size_t>(n.feature)];
        if (std::isnan(v)) {
            i = n.default_left ? n.left : n.right;
        } else {
            i = v < n.threshold ? n.left : n.right;
        }
    }
    return i;
}

double Tree::predict(std::span<const double> x) const
{
    if (nodes.empty()) return 0.0;
    return nodes[static_cast<std::size_t>(leaf(x))].value;
}

double predict_row(const TreeEnsemble& model, std::span<const double> row)
{
    if (row.size() != model.n_features()) {
        throw Error(Errc::DimensionMismatch, "row has " + std::to_string(row.size()) + " features, model expects "
                                                 + std::to_string(model.n_features()));
    }
    double sum = 0.0;
    for (const auto& t : model.trees) sum += t.predict(row);
    return model.base_score + model.learning_rate * sum;
}

std::vector<double> predict(const TreeEnsemble& model, const Matrix& rows)
{
    if (rows.rows() > 0 && rows.cols() != model.n_features()) {
        throw Error(Errc::DimensionMismatch, "rows have " + std::to_string(rows.cols()) + " features, model expects "
                                                 + std::to_string(model.n_features()));
    }
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_row(model, rows.row(i));
    return out;
}

namespace {

double score(double g, double h, double lambda) { return h + lambda > 0.0 ? g * g / (h + lambda) : 0.0; }

/// Scan one feature's rows, sorted by value, for the best threshold.
void scan_feature(const Matrix& x, std::span<const double> grad, std::span<const std::size_t> sorted,
                  std::size_t feature, double g_total, const BoostParams& p, std::optional<SplitCandidate>& best)
{
    const double h_total = static_cast<double>(sorted.size());
    const double parent = score(g_total, h_total, p.lambda);
    double gl = 0.0;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        gl += grad[sorted[k]];
        const double lo = x(sorted[k], feature);
        const double hi = x(sorted[k + 1], feature);
        if (!(hi > lo)) continue;
        const double hl = static_cast<double>(k + 1);
        const double hr = h_total - hl;
        if (hl < p.min_child_weight || hr < p.min_child_weight) continue;
        const double gain = 0.5 * (score(gl, hl, p.lambda) + score(g_total - gl, hr, p.lambda) - parent) - p.gamma;
        if (!best || gain > best->gain) {
            double thr = lo + (hi - lo) / 2.0;
            if (!(thr > lo && thr <= hi)) thr = hi;
            best = SplitCandidate{feature, thr, gain};
        }
    }
}

bool worth_splitting(const std::optional<SplitCandidate>& best, double g_total, double h_total, double lambda)
{
    // Rounding noise on an already pure node must not create splits.
    return best && best->gain > 1e-12 * (1.0 + score(g_total, h_total, lambda));
}

class Grower {
public:
    Grower(const Matrix& x, std::span<const double> grad, const BoostParams& p) : x_(x), grad_(grad), p_(p) {}

    /// `sorted[f]` lists the node's rows ordered by feature f.
    Tree grow(std::vector<std::vector<std::size_t>> sorted)
    {
        Tree t;
        build(t, std::move(sorted), 0);
        return t;
    }

private:
    int build(Tree& t, std::vector<std::vector<std::size_t>> sorted, int depth)
    {
        const auto& rows = sorted.front();
        double g = 0.0;
        for (auto r : rows) g += grad_[r];
        const double h = static_cast<double>(rows.size());

        const int index = static_cast<int>(t.nodes.size());
        t.nodes.push_back({});
        t.nodes.back().cover = h;
        t.nodes.back().value = -g / (h + p_.lambda);

        std::optional<SplitCandidate> best;
        if (depth < p_.max_depth) {
            for (std::size_t f = 0; f < sorted.size(); ++f) scan_feature(x_, grad_, sorted[f], f, g, p_, best);
        }
        if (!worth_splitting(best, g, h, p_.lambda)) return index;

        std::vector<std::vector<std::size_t>> left(sorted.size()), right(sorted.size());
        for (std::size_t f = 0; f < sorted.size(); ++f) {
            for (auto r : sorted[f]) {
                (x_(r, best->feature) < best->threshold ? left[f] : right[f]).push_back(r);
            }
        }
        sorted.clear();
        const bool default_left = left.front().size() >= right.front().size();
        const int l = build(t, std::move(left), depth + 1);
        const int r = build(t, std::move(right), depth + 1);
        auto& node = t.nodes[static_cast<std::size_t>(index)];
        node.feature = static_cast<int>(best->feature);
        node.threshold = best->threshold;
        node.gain = best->gain;
        node.left = l;
        node.right = r;
        node.default_left = default_left;
        return index;
    }

    const Matrix& x_;
    std::span<const double> grad_;
    const BoostParams& p_;
};

std::vector<std::size_t> sorted_by(const Matrix& x, std::span<const std::size_t> rows, std::size_t feature)
{
    std::vector<std::size_t> out(rows.begin(), rows.end());
    std::stable_sort(out.begin(), out.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, feature) < x(b, feature); });
    return out;
}

double rmse(std::span<const double> y, std::span<const double> pred)
{
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) ss += (pred[i] - y[i]) * (pred[i] - y[i]);
    return y.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(y.size()));
}

} // namespace

std::optional<SplitCandidate> find_best_split(const Matrix& x, std::span<const double> grad,
                                              std::span<const std::size_t> rows, const BoostParams& params)
{
    double g = 0.0;
    for (auto r : rows) g += grad[r];
    std::optional<SplitCandidate> best;
    for (std::size_t f = 0; f < x.cols(); ++f) scan_feature(x, grad, sorted_by(x, rows, f), f, g, params, best);
    if (!worth_splitting(best, g, static_cast<double>(rows.size()), params.lambda)) return std::nullopt;
    return best;
}

TreeEnsemble train(const Matrix& x, std::span<const double> y, const BoostParams& params,
                   std::vector<std::string> names, std::vector<double>* train_rmse)
{
    check_params(params);
    if (x.rows() != y.size()) {
        throw Error(Errc::DimensionMismatch, std::to_string(x.rows()) + " rows but " + std::to_string(y.size())
                                                 + " targets");
    }
    if (y.empty()) throw Error(Errc::TooFewRows, "no training rows");
    if (x.cols() == 0) throw Error(Errc::DimensionMismatch, "training rows have no features");
    for (double v : y) {
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteTarget, "training target is not finite");
    }
    for (double v : x.data()) {
        if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "training features must be finite");
    }
    if (names.empty()) {
        for (std::size_t f = 0; f < x.cols(); ++f) names.push_back("f" + std::to_string(f));
    }
    if (names.size() != x.cols()) throw Error(Errc::DimensionMismatch, "feature name count differs from columns");

    TreeEnsemble model;
    model.params = params;
    model.learning_rate = params.learning_rate;
    model.feature_names = std::move(names);
    model.base_score = params.base_score.value_or(std::accumulate(y.begin(), y.end(), 0.0)
                                                  / static_cast<double>(y.size()));

    std::vector<std::size_t> all(x.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> presorted(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) presorted[f] = sorted_by(x, all, f);

    std::vector<double> pred(y.size(), model.base_score), grad(y.size());
    Rng rng(params.seed);
    std::vector<char> in_sample(y.size(), 1);
    for (int round = 0; round < params.n_rounds; ++round) {
        for (std::size_t i = 0; i < y.size(); ++i) grad[i] = pred[i] - y[i];

        std::vector<std::vector<std::size_t>> sorted;
        if (params.subsample < 1.0) {
            std::size_t kept = 0;
            for (auto& s : in_sample) {
                s = rng.bernoulli(params.subsample);
                kept += static_cast<std::size_t>(s);
            }
            if (kept == 0) in_sample[static_cast<std::size_t>(rng.below(y.size()))] = 1;
            sorted.resize(x.cols());
            for (std::size_t f = 0; f < x.cols(); ++f) {
                for (auto r : presorted[f]) {
                    if (in_sample[r]) sorted[f].push_back(r);
                }
            }
        } else {
            sorted = presorted;
        }

        Tree tree = Grower(x, grad, params).grow(std::move(sorted));
        for (std::size_t i = 0; i < y.size(); ++i) pred[i] += params.learning_rate * tree.predict(x.row(i));
        model.trees.push_back(std::move(tree));
        if (train_rmse) train_rmse->push_back(rmse(y, pred));
    }
    return model;
}

const char* to_string(SplitScheme s) noexcept
{
    return s == SplitScheme::ByMatch ? "by_match" : "by_point_random";
}

SplitScheme split_scheme_from_string(const std::string& s)
{
    if (s == "by_point_random") return SplitScheme::ByPointRandom;
    if (s == "by_match") return SplitScheme::ByMatch;
    throw Error(Errc::InvalidArgument, "unknown split scheme '" + s + "'");
}

FrameSplit split_frame(const FeatureFrame& frame, const SplitSpec& spec)
{
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw Error(Errc::InvalidArgument, "train_fraction must be in (0, 1)");
    }
    Rng rng(spec.seed);
    FrameSplit out;
    if (spec.scheme == SplitScheme::ByPointRandom) {
        std::vector<std::size_t> order(frame.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(order.size())));
        out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, order.size())));
        out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(out.train.size()), order.end());
    } else {
        const std::size_t m = frame.match_ids.size();
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(m)));
        std::vector<char> is_train(m, 0);
        for (std::size_t k = 0; k < std::min(n_train, m); ++k) is_train[order[k]] = 1;
        for (std::size_t i = 0; i < frame.size(); ++i) {
            (is_train[frame.match_index[i]] ? out.train : out.test).push_back(i);
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    if (out.train.empty() || out.test.empty()) {
        throw Error(Errc::EmptyTestSet, "split leaves " + std::to_string(out.train.size()) + " training and "
                                            + std::to_string(out.test.size()) + " test rows");
    }
    return out;
}

Metrics regression_metrics(std::span<const double> truth, std::span<const double> predicted)
{
    if (truth.empty()) throw Error(Errc::EmptyTestSet, "no rows to evaluate");
    if (truth.size() != predicted.size()) throw Error(Errc::LengthMismatch, "truth and predictions differ in length");
    Metrics m;
    m.n = truth.size();
    const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / static_cast<double>(m.n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        ss_res += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    m.rmse = std::sqrt(ss_res / static_cast<double>(m.n));
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - ss_res / ss_tot;
    } else {
        m.degenerate = true;
        m.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    }
    return m;
}

namespace {

std::optional<double> swing_accuracy(const FeatureFrame& frame, std::span<const double> pred,
                                     std::span<const std::size_t> test, double tie_eps)
{
    // Per match: point_no -> row of each view.
    struct Slot {
        std::ptrdiff_t p1 = -1;
        std::ptrdiff_t p2 = -1;
    };
    std::vector<std::vector<std::pair<int, Slot>>> per_match(frame.match_ids.size());
    std::vector<std::vector<int>> positions(frame.match_ids.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        auto& slots = per_match[frame.match_index[i]];
        auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return s.first == frame.point_no[i]; });
        if (it == slots.end()) {
            slots.push_back({frame.point_no[i], {}});
            it = slots.end() - 1;
        }
        (frame.view[i] == Player::P1 ? it->second.p1 : it->second.p2) = static_cast<std::ptrdiff_t>(i);
    }

    std::vector<char> is_test(frame.size(), 0);
    for (auto i : test) is_test[i] = 1;
    std::size_t agree = 0, total = 0;
    for (auto& slots : per_match) {
        if (slots.empty()) continue;
        std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> truth_diff, pred_diff;
        std::vector<int> points;
        bool complete = true;
        for (const auto& [point, s] : slots) {
            if (s.p1 < 0 || s.p2 < 0) {
                complete = false;
                break;
            }
            const auto a = static_cast<std::size_t>(s.p1), b = static_cast<std::size_t>(s.p2);
            truth_diff.push_back(frame.target[a] - frame.target[b]);
            pred_diff.push_back(pred[a] - pred[b]);
            points.push_back(point);
        }
        if (!complete) continue;
        const auto truth = label_differential(truth_diff, points, tie_eps);
        const auto guess = label_differential(pred_diff, points, tie_eps);
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const auto& s = slots[k].second;
            if (!is_test[static_cast<std::size_t>(s.p1)] && !is_test[static_cast<std::size_t>(s.p2)]) continue;
            ++total;
            agree += truth[k].swing == guess[k].swing;
        }
    }
    if (total == 0) return std::nullopt;
    return static_cast<double>(agree) / static_cast<double>(total);
}

Metrics subset_metrics(const FeatureFrame& frame, std::span<const double> pred, std::span<const std::size_t> rows)
{
    std::vector<double> t, p;
    for (auto i : rows) {
        t.push_back(frame.target[i]);
        p.push_back(pred[i]);
    }
    return regression_metrics(t, p);
}

} // namespace

EvalReport evaluate(const TreeEnsemble& model, const FeatureFrame& frame, std::span<const std::size_t> train,
                    std::span<const std::size_t> test, double tie_eps)
{
    if (test.empty()) throw Error(Errc::EmptyTestSet, "no test rows");
    EvalReport r;
    r.params = model.params;
    const auto pred = predict(model, frame.rows);
    r.test = subset_metrics(frame, pred, test);
    if (!train.empty()) r.train = subset_metrics(frame, pred, train);
    r.swing_accuracy = swing_accuracy(frame, pred, test, tie_eps);
    return r;
}

std::pair<TreeEnsemble, EvalReport> fit(const FeatureFrame& frame, const BoostParams& params, const SplitSpec& split)
{
    check_params(params);
    if (frame.size() < 10) {
        throw Error(Errc::TooFewRows, std::to_string(frame.size()) + " rows; at least 10 are needed");
    }
    for (double v : frame.target) {
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteTarget, "momentum target is not finite");
    }
    const FrameSplit s = split_frame(frame, split);
    Matrix x(0, frame.rows.cols());
    std::vector<double> y;
    for (auto i : s.train) {
        x.append_row(frame.rows.row(i));
        y.push_back(frame.target[i]);
    }
    TreeEnsemble model = train(x, y, params, frame.names);
    EvalReport report = evaluate(model, frame, s.train, s.test);
    report.split = split;
    return {std::move(model), std::move(report)};
}

} // namespace tennis
