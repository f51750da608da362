#include "tennis/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tennis/error.hpp"
#include "tennis/weighting.hpp"

namespace tennis {

using nlohmann::json;

namespace {

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_json(const std::optional<double>& v) { return v ? real_or_null(*v) : json(nullptr); }

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::EmptyFile, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename F>
auto stage(const char* name, F&& body)
{
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.detail(), e.line());
    }
}

json boosting_json(const BoostParams& p)
{
    json j = {
        {"n_rounds", p.n_rounds},   {"learning_rate", p.learning_rate},
        {"max_depth", p.max_depth}, {"lambda", p.lambda},
        {"gamma", p.gamma},         {"min_child_weight", p.min_child_weight},
        {"subsample", p.subsample}, {"seed", p.seed},
    };
    j["base_score"] = p.base_score ? json(*p.base_score) : json(nullptr);
    return j;
}

json split_json(const SplitSpec& s)
{
    return {{"train_fraction", s.train_fraction}, {"scheme", to_string(s.scheme)}, {"seed", s.seed}};
}

json config_json(const RunConfig& c)
{
    std::vector<std::string> inputs, external;
    for (const auto& p : c.inputs) inputs.push_back(p.generic_string());
    for (const auto& p : c.external) external.push_back(p.generic_string());
    json pairs = json::array();
    for (const auto& [f, color] : c.dependence) pairs.push_back({f, color});
    return {
        {"inputs", inputs},
        {"output_dir", c.output_dir.generic_string()},
        {"schema_mode", c.schema == SchemaMode::Strict ? "strict" : "lenient"},
        {"window", c.scoring.window},
        {"xi", c.scoring.xi},
        {"rho", c.scoring.rho},
        {"alpha", c.scoring.alpha},
        {"ema_period", c.scoring.ema_period},
        {"epsilon", c.scoring.epsilon},
        {"scope", to_string(c.scoring.scope)},
        {"null_replicates", c.null_sim.n_datasets},
        {"null_scheme", to_string(c.null_sim.scheme)},
        {"seed", c.null_sim.seed},
        {"threads", c.null_sim.threads},
        {"alpha_level", c.alpha_level},
        {"boosting", boosting_json(c.boosting)},
        {"split", split_json(c.split)},
        {"view", to_string(c.view)},
        {"dependence_pairs", std::move(pairs)},
        {"external", external},
        {"xi_grid", c.xi_grid},
        {"stability_match", c.stability_match},
        {"stability_player", c.stability_player == Player::P1 ? "p1" : "p2"},
    };
}

template <typename T>
T get_as(const json& j, const std::string& key)
{
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::InvalidArgument, "config key '" + key + "' has the wrong type");
    }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw Error(Errc::InvalidArgument, where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw Error(Errc::InvalidArgument, "unknown config key '" + where + item.key() + "'");
        }
    }
}

std::vector<std::filesystem::path> paths(const json& j, const std::string& key)
{
    std::vector<std::filesystem::path> out;
    for (const auto& s : get_as<std::vector<std::string>>(j, key)) out.emplace_back(s);
    return out;
}

} // namespace

void check_config(const RunConfig& c)
{
    check_params(c.scoring);
    check_params(c.boosting);
    if (!(c.split.train_fraction > 0.0 && c.split.train_fraction < 1.0)) {
        throw Error(Errc::InvalidArgument, "split.train_fraction must be in (0, 1)");
    }
    if (c.null_sim.n_datasets < 1) throw Error(Errc::InvalidArgument, "null_replicates must be >= 1");
    if (!(c.alpha_level > 0.0 && c.alpha_level < 1.0)) throw Error(Errc::InvalidArgument, "alpha_level must be in (0, 1)");
    if (c.xi_grid.empty()) throw Error(Errc::EmptyGrid, "xi_grid is empty");
    for (double xi : c.xi_grid) {
        if (!(xi >= kMinServeFactor && xi <= kMaxServeFactor)) {
            throw Error(Errc::XiOutOfRange, "xi_grid value " + format_real(xi) + " outside [0.05, 0.15]");
        }
    }
    const auto& names = feature_names();
    for (const auto& [f, color] : c.dependence) {
        for (const auto& n : {f, color}) {
            if (std::find(names.begin(), names.end(), n) == names.end()) {
                throw Error(Errc::UnknownFeature, "dependence feature '" + n + "'");
            }
        }
    }
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text, RunConfig c)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"inputs", "output_dir", "schema_mode", "window", "xi", "rho", "alpha", "ema_period", "epsilon",
                "scope", "null_replicates", "null_scheme", "seed", "threads", "alpha_level", "boosting", "split",
                "view", "dependence_pairs", "external", "xi_grid", "stability_match", "stability_player"},
               "");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        const json& v = item.value();
        if (k == "inputs") c.inputs = paths(v, k);
        else if (k == "output_dir") c.output_dir = get_as<std::string>(v, k);
        else if (k == "schema_mode") {
            const auto m = get_as<std::string>(v, k);
            if (m != "strict" && m != "lenient") throw Error(Errc::InvalidArgument, "schema_mode must be strict or lenient");
            c.schema = m == "strict" ? SchemaMode::Strict : SchemaMode::Lenient;
        }
        else if (k == "window") c.scoring.window = get_as<int>(v, k);
        else if (k == "xi") c.scoring.xi = get_as<double>(v, k);
        else if (k == "rho") c.scoring.rho = get_as<double>(v, k);
        else if (k == "alpha") c.scoring.alpha = get_as<double>(v, k);
        else if (k == "ema_period") c.scoring.ema_period = get_as<int>(v, k);
        else if (k == "epsilon") c.scoring.epsilon = get_as<double>(v, k);
        else if (k == "scope") c.scoring.scope = scope_from_string(get_as<std::string>(v, k));
        else if (k == "null_replicates") c.null_sim.n_datasets = get_as<int>(v, k);
        else if (k == "null_scheme") c.null_sim.scheme = null_scheme_from_string(get_as<std::string>(v, k));
        else if (k == "seed") c.null_sim.seed = get_as<std::uint64_t>(v, k);
        else if (k == "threads") c.null_sim.threads = get_as<unsigned>(v, k);
        else if (k == "alpha_level") c.alpha_level = get_as<double>(v, k);
        else if (k == "boosting") {
            check_keys(v, {"n_rounds", "learning_rate", "max_depth", "lambda", "gamma", "min_child_weight",
                           "subsample", "seed", "base_score"},
                       "boosting.");
            auto& b = c.boosting;
            for (const auto& bi : v.items()) {
                const std::string key = "boosting." + bi.key();
                const json& bv = bi.value();
                if (bi.key() == "n_rounds") b.n_rounds = get_as<int>(bv, key);
                else if (bi.key() == "learning_rate") b.learning_rate = get_as<double>(bv, key);
                else if (bi.key() == "max_depth") b.max_depth = get_as<int>(bv, key);
                else if (bi.key() == "lambda") b.lambda = get_as<double>(bv, key);
                else if (bi.key() == "gamma") b.gamma = get_as<double>(bv, key);
                else if (bi.key() == "min_child_weight") b.min_child_weight = get_as<double>(bv, key);
                else if (bi.key() == "subsample") b.subsample = get_as<double>(bv, key);
                else if (bi.key() == "seed") b.seed = get_as<std::uint64_t>(bv, key);
                else if (bi.key() == "base_score") {
                    if (bv.is_null()) b.base_score.reset();
                    else b.base_score = get_as<double>(bv, key);
                }
            }
        }
        else if (k == "split") {
            check_keys(v, {"train_fraction", "scheme", "seed"}, "split.");
            if (v.contains("train_fraction")) c.split.train_fraction = get_as<double>(v["train_fraction"], "split.train_fraction");
            if (v.contains("scheme")) c.split.scheme = split_scheme_from_string(get_as<std::string>(v["scheme"], "split.scheme"));
            if (v.contains("seed")) c.split.seed = get_as<std::uint64_t>(v["seed"], "split.seed");
        }
        else if (k == "view") c.view = player_view_from_string(get_as<std::string>(v, k));
        else if (k == "dependence_pairs") {
            c.dependence.clear();
            for (const auto& pair : get_as<std::vector<std::vector<std::string>>>(v, k)) {
                if (pair.size() != 2) throw Error(Errc::InvalidArgument, "dependence_pairs entries are [feature, color_by]");
                c.dependence.emplace_back(pair[0], pair[1]);
            }
        }
        else if (k == "external") c.external = paths(v, k);
        else if (k == "xi_grid") c.xi_grid = get_as<std::vector<double>>(v, k);
        else if (k == "stability_match") c.stability_match = get_as<std::string>(v, k);
        else if (k == "stability_player") {
            const auto p = get_as<std::string>(v, k);
            if (p != "p1" && p != "p2") throw Error(Errc::InvalidArgument, "stability_player must be p1 or p2");
            c.stability_player = p == "p1" ? Player::P1 : Player::P2;
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), std::move(base));
}

LoadedInputs load_inputs(std::span<const std::filesystem::path> input_paths, SchemaMode mode)
{
    if (input_paths.empty()) throw Error(Errc::InvalidArgument, "no input files given");
    LoadedInputs out;
    for (const auto& p : input_paths) {
        ParseResult r = parse_csv(p, mode);
        for (auto& m : r.matches) out.matches.push_back(std::move(m));
        for (auto& c : r.extra_columns) {
            if (std::find(out.extra_columns.begin(), out.extra_columns.end(), c) == out.extra_columns.end()) {
                out.extra_columns.push_back(c);
            }
        }
        for (auto& w : r.warnings) out.warnings.push_back(p.filename().string() + ": " + w);
        out.dropped_rows += r.dropped_rows;
    }
    return out;
}

std::vector<PerPlayer<MomentumSeries>> momentum_of(const ScoreResult& scores)
{
    std::vector<PerPlayer<MomentumSeries>> out;
    out.reserve(scores.matches.size());
    for (const auto& m : scores.matches) out.push_back(m.momentum);
    return out;
}

FeatureFrame frame_for(std::span<const MatchData> matches, const ScoringParams& scoring, PlayerView view)
{
    const auto mom = momentum_of(score_matches(matches, scoring));
    return build_features(matches, mom, view);
}

GeneralizationReport generalize(const ModelFile& model, std::span<const std::filesystem::path> datasets)
{
    GeneralizationReport r;
    const ScoringParams scoring = model.scoring.value_or(ScoringParams{});
    for (const auto& path : datasets) {
        ParseResult parsed;
        try {
            parsed = parse_csv(path, SchemaMode::Lenient);
        } catch (const Error& e) {
            if (e.code() != Errc::MissingColumn) throw;
            throw Error(Errc::SchemaIncompatible, path.string() + ": " + e.detail());
        }
        const FeatureFrame frame = frame_for(parsed.matches, scoring, model.view);
        std::vector<std::size_t> all(frame.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const EvalReport eval = evaluate(model.model, frame, {}, all);
        GeneralizationEntry e;
        e.name = path.stem().string();
        for (const auto& m : parsed.matches) e.n_points += m.points.size();
        e.metrics = eval.test;
        e.swing_accuracy = eval.swing_accuracy;
        r.datasets.push_back(std::move(e));
    }
    return r;
}

StabilityReport stability_sweep(std::span<const MatchData> matches, const ScoringParams& scoring,
                                std::vector<double> grid, const std::string& match_id, Player player)
{
    if (grid.empty()) throw Error(Errc::EmptyGrid, "xi grid is empty");
    for (double xi : grid) {
        if (!(xi >= kMinServeFactor && xi <= kMaxServeFactor)) {
            throw Error(Errc::XiOutOfRange, "xi " + format_real(xi) + " outside [0.05, 0.15]");
        }
    }
    if (matches.empty()) throw Error(Errc::EmptyMatrix, "no matches to sweep");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::size_t target = 0;
    if (!match_id.empty()) {
        const auto it = std::find_if(matches.begin(), matches.end(),
                                     [&](const MatchData& m) { return m.match_id == match_id; });
        if (it == matches.end()) throw Error(Errc::InvalidArgument, "no match '" + match_id + "' in the input");
        target = static_cast<std::size_t>(it - matches.begin());
    }

    StabilityReport r;
    r.xi_grid = grid;
    r.match_id = matches[target].match_id;
    r.player = player;
    for (double xi : grid) {
        ScoringParams p = scoring;
        p.xi = xi;
        const auto scored = score_matches(matches, p);
        const auto& series = scored.matches[target].performance[player];
        if (r.point_no.empty()) {
            for (const auto& pt : matches[target].points) r.point_no.push_back(pt.point_no);
        }
        r.scores.push_back(series.scores);
    }
    const std::size_t n = r.point_no.size();
    std::vector<double> diff(n);
    for (std::size_t t = 0; t < n; ++t) {
        double lo = r.scores.front()[t], hi = lo;
        for (const auto& s : r.scores) {
            lo = std::min(lo, s[t]);
            hi = std::max(hi, s[t]);
        }
        r.range_of_output = std::max(r.range_of_output, hi - lo);
        diff[t] = r.scores.back()[t] - r.scores.front()[t];
    }
    if (n > 0) {
        const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double d : diff) ss += (d - mean) * (d - mean);
        r.variance_of_differences = ss / static_cast<double>(n);
    }
    return r;
}

std::string weights_json(const ScoreResult& scores)
{
    json scopes = json::array();
    for (const auto& s : scores.scopes) {
        json indicators = json::array();
        for (std::size_t j = 0; j < scores.specs.size(); ++j) {
            const auto& spec = scores.specs[j];
            indicators.push_back({
                {"id", "X" + std::to_string(static_cast<int>(spec.id))},
                {"name", spec.name},
                {"direction", spec.direction == Direction::Benefit ? "benefit" : "cost"},
                {"entropy", real_or_null(s.weights.raw_entropy[j])},
                {"raw_weight", real_or_null(s.weights.raw_weights[j])},
                {"adjusted_weight", real_or_null(s.weights.adjusted[j])},
                {"grey_relation", real_or_null(s.relation[j])},
                {"grey_degree", real_or_null(s.degrees[j])},
            });
        }
        scopes.push_back({
            {"match_ids", s.match_ids},
            {"xi", s.weights.xi},
            {"epsilon", s.weights.epsilon},
            {"degenerate", s.weights.degenerate},
            {"ma", s.ma},
            {"mi", s.mi},
            {"indicators", std::move(indicators)},
        });
    }
    return json{{"scopes", std::move(scopes)}}.dump(2) + "\n";
}

std::string scores_csv(const ScoreResult& scores)
{
    std::ostringstream out;
    out << "match_id,point_no,player,score\n";
    for (const auto& m : scores.matches) {
        for (Player p : {Player::P1, Player::P2}) {
            const auto& s = m.performance[p];
            for (std::size_t t = 0; t < s.scores.size(); ++t) {
                out << m.match_id << ',' << s.point_no[t] << ',' << to_string(p) << ',' << format_real(s.scores[t])
                    << '\n';
            }
        }
    }
    return out.str();
}

std::string momentum_csv(const ScoreResult& scores)
{
    std::ostringstream out;
    out << "match_id,point_no,p1_momentum,p2_momentum,differential,leader,swing\n";
    for (const auto& m : scores.matches) {
        const auto& a = m.momentum.p1;
        const auto& b = m.momentum.p2;
        const auto labels = label_swings(a, b);
        for (std::size_t t = 0; t < a.values.size(); ++t) {
            out << m.match_id << ',' << a.point_no[t] << ',' << format_real(a.values[t]) << ','
                << format_real(b.values[t]) << ',' << format_real(a.values[t] - b.values[t]) << ','
                << to_string(labels[t].leader) << ',' << (labels[t].swing ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string validation_json(const MomentumValidation& v)
{
    const auto& r = v.report;
    json sim = {{"n", v.simulated.size()}};
    if (!v.simulated.empty()) {
        const auto [lo, hi] = std::minmax_element(v.simulated.begin(), v.simulated.end());
        sim["min"] = *lo;
        sim["max"] = *hi;
        sim["mean"] = std::accumulate(v.simulated.begin(), v.simulated.end(), 0.0)
                    / static_cast<double>(v.simulated.size());
    }
    sim["values"] = v.simulated;
    return json{
        {"statistic", "abs_lag1_autocorrelation_of_momentum"},
        {"null", {{"replicates", v.config.n_datasets}, {"seed", v.config.seed}, {"scheme", to_string(v.config.scheme)}}},
        {"real", v.real},
        {"simulated", std::move(sim)},
        {"n1", r.n1},
        {"n2", r.n2},
        {"alpha_level", r.alpha_level},
        {"mann_whitney", {{"u", r.u_stat}, {"r1", r.r1}, {"r2", r.r2}, {"p", r.p_mwu}, {"reject", r.reject_mwu}}},
        {"ks", {{"d", r.d_stat}, {"p", r.p_ks}, {"critical_d", r.ks_critical}, {"reject", r.reject_ks}}},
    }
        .dump(2)
        + "\n";
}

namespace {

json metrics_json(const Metrics& m)
{
    return {{"n", m.n}, {"r2", real_or_null(m.r2)}, {"rmse", real_or_null(m.rmse)}, {"degenerate", m.degenerate}};
}

} // namespace

std::string eval_json(const EvalReport& r, PlayerView view)
{
    return json{
        {"metric", "r2"},
        {"train", metrics_json(r.train)},
        {"test", metrics_json(r.test)},
        {"swing_accuracy", optional_json(r.swing_accuracy)},
        {"params", boosting_json(r.params)},
        {"split", split_json(r.split)},
        {"view", to_string(view)},
    }
               .dump(2)
        + "\n";
}

std::string shap_csv(const ShapMatrix& shap, const FeatureFrame& frame)
{
    std::ostringstream out;
    out << "match_id,player,point_no";
    for (const auto& n : shap.feature_names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < shap.values.rows(); ++i) {
        out << frame.match_ids[frame.match_index[i]] << ',' << to_string(frame.view[i]) << ',' << frame.point_no[i];
        for (double v : shap.values.row(i)) out << ',' << format_real(v);
        out << '\n';
    }
    return out.str();
}

std::string importance_json(const ImportanceReport& r, double base_value)
{
    json ranking = json::array();
    for (const auto& [name, v] : r.ranking) ranking.push_back({{"feature", name}, {"mean_abs_shap", v}});
    return json{{"base_value", base_value}, {"ranking", std::move(ranking)}}.dump(2) + "\n";
}

std::string dependence_csv(const std::vector<DependencePoint>& points, const std::string& feature,
                           const std::string& color_by)
{
    std::ostringstream out;
    out << feature << ",shap_" << feature << ',' << color_by << '\n';
    for (const auto& p : points) out << format_real(p.x) << ',' << format_real(p.phi) << ',' << format_real(p.color) << '\n';
    return out.str();
}

std::string generalization_json(const GeneralizationReport& r)
{
    json ds = json::array();
    for (const auto& e : r.datasets) {
        ds.push_back({
            {"name", e.name},
            {"n_points", e.n_points},
            {"r2", real_or_null(e.metrics.r2)},
            {"rmse", real_or_null(e.metrics.rmse)},
            {"degenerate", e.metrics.degenerate},
            {"swing_accuracy", optional_json(e.swing_accuracy)},
        });
    }
    return json{{"in_domain_test_r2", optional_json(r.in_domain_r2)}, {"n_datasets", r.datasets.size()},
                {"datasets", std::move(ds)}}
               .dump(2)
        + "\n";
}

std::string stability_json(const StabilityReport& r)
{
    json series = json::array();
    for (std::size_t k = 0; k < r.xi_grid.size(); ++k) series.push_back({{"xi", r.xi_grid[k]}, {"score", r.scores[k]}});
    return json{
        {"match_id", r.match_id},
        {"player", to_string(r.player)},
        {"xi_grid", r.xi_grid},
        {"range_of_output", r.range_of_output},
        {"variance_of_differences", r.variance_of_differences},
        {"point_no", r.point_no},
        {"series", std::move(series)},
    }
               .dump(2)
        + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(Errc::InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunSummary run_all(const RunConfig& cfg)
{
    check_config(cfg);
    RunSummary summary;
    std::vector<std::pair<std::string, std::string>> written;
    const auto emit = [&](const std::string& rel, std::string content) {
        write_atomic(cfg.output_dir / rel, content);
        written.emplace_back(rel, std::move(content));
    };

    const LoadedInputs in = stage("ingest", [&] { return load_inputs(cfg.inputs, cfg.schema); });
    const ScoreResult scores = stage("score", [&] { return score_matches(in.matches, cfg.scoring); });
    emit("weights.json", weights_json(scores));
    emit("scores.csv", scores_csv(scores));
    emit("momentum.csv", momentum_csv(scores));

    summary.validation = stage("validate", [&] {
        return validate_momentum(in.matches, cfg.null_sim, cfg.scoring, cfg.alpha_level);
    });
    emit("validation.json", validation_json(summary.validation));

    const FeatureFrame frame = stage("features", [&] { return build_features(in.matches, momentum_of(scores), cfg.view); });
    auto [model, eval] = stage("train", [&] { return fit(frame, cfg.boosting, cfg.split); });
    summary.eval = eval;
    const ModelFile model_file{model, cfg.scoring, cfg.view};
    {
        std::ostringstream out;
        write_model(out, model_file);
        emit("model.json", out.str());
    }
    emit("eval.json", eval_json(eval, cfg.view));

    stage("explain", [&] {
        const ShapMatrix shap = tree_shap(model, frame.rows);
        summary.importance = importance(shap);
        emit("shap.csv", shap_csv(shap, frame));
        emit("importance.json", importance_json(summary.importance, shap.base_value));
        for (const auto& [f, color] : cfg.dependence) {
            emit("dependence/" + f + "_vs_" + color + ".csv", dependence_csv(dependence_pairs(shap, frame, f, color), f, color));
        }
        return 0;
    });

    summary.generalization = stage("generalize", [&] { return generalize(model_file, cfg.external); });
    summary.generalization.in_domain_r2 = eval.test.r2;
    emit("generalization.json", generalization_json(summary.generalization));

    summary.stability = stage("stability", [&] {
        return stability_sweep(in.matches, cfg.scoring, cfg.xi_grid, cfg.stability_match, cfg.stability_player);
    });
    emit("stability.json", stability_json(summary.stability));

    std::sort(written.begin(), written.end());
    const std::string config_text = config_to_json(cfg);
    json files = json::array();
    for (const auto& [rel, content] : written) {
        files.push_back({{"path", rel}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
        summary.files.push_back(rel);
    }
    json inputs = json::array();
    for (const auto& p : cfg.inputs) {
        const std::string bytes = read_file(p);
        inputs.push_back({{"path", p.generic_string()}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    const json manifest = {
        {"tool", "tmomentum"},
        {"version", kToolVersion},
        {"model_format_version", kModelFormatVersion},
        {"config", json::parse(config_text)},
        {"config_hash", hex64(fnv1a64(config_text))},
        {"inputs", std::move(inputs)},
        {"files", std::move(files)},
    };
    write_atomic(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");
    summary.files.push_back("manifest.json");
    std::sort(summary.files.begin(), summary.files.end());
    return summary;
}

} // namespace tennis
