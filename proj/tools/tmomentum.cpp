// tmomentum: momentum scoring, validation and attribution for point-by-point
// tennis data.
//
// Exit codes: 0 success, 1 data error, 2 configuration error.

#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "tennis/attribution.hpp"
#include "tennis/error.hpp"
#include "tennis/indicators.hpp"
#include "tennis/model_io.hpp"
#include "tennis/pipeline.hpp"

using namespace tennis;
namespace fs = std::filesystem;

namespace {

/// Flags override values from --config; they are applied after the file is read.
struct Settings {
    std::string config_path;
    std::vector<std::function<void(RunConfig&)>> overrides;

    RunConfig resolve() const
    {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        for (const auto& f : overrides) f(cfg);
        return cfg;
    }
};

template <typename T>
void flag(CLI::App* app, Settings& s, const std::string& name, const std::string& help,
          std::function<void(RunConfig&, const T&)> apply)
{
    app->add_option_function<T>(
        name, [&s, apply](const T& v) { s.overrides.push_back([apply, v](RunConfig& c) { apply(c, v); }); }, help);
}

void input_flags(CLI::App* app, Settings& s)
{
    app->add_option("--config", s.config_path, "JSON run configuration");
    app->add_option_function<std::vector<std::string>>(
        "inputs",
        [&s](const std::vector<std::string>& v) {
            s.overrides.push_back([v](RunConfig& c) { c.inputs.assign(v.begin(), v.end()); });
        },
        "point-by-point CSV files");
    app->add_flag_callback(
        "--lenient", [&s] { s.overrides.push_back([](RunConfig& c) { c.schema = SchemaMode::Lenient; }); },
        "drop malformed rows instead of failing");
}

void scoring_flags(CLI::App* app, Settings& s)
{
    flag<int>(app, s, "--window", "indicator and score window", [](RunConfig& c, const int& v) { c.scoring.window = v; });
    flag<double>(app, s, "--xi", "serve advantage factor", [](RunConfig& c, const double& v) { c.scoring.xi = v; });
    flag<double>(app, s, "--rho", "grey resolution factor", [](RunConfig& c, const double& v) { c.scoring.rho = v; });
    flag<double>(app, s, "--alpha", "EMA smoothing factor", [](RunConfig& c, const double& v) { c.scoring.alpha = v; });
    flag<int>(app, s, "--ema-period", "EMA period", [](RunConfig& c, const int& v) { c.scoring.ema_period = v; });
    flag<double>(app, s, "--epsilon", "entropy epsilon", [](RunConfig& c, const double& v) { c.scoring.epsilon = v; });
    flag<std::string>(app, s, "--scope", "tournament or match",
                      [](RunConfig& c, const std::string& v) { c.scoring.scope = scope_from_string(v); });
}

void null_flags(CLI::App* app, Settings& s)
{
    flag<int>(app, s, "--replicates", "null datasets", [](RunConfig& c, const int& v) { c.null_sim.n_datasets = v; });
    flag<std::uint64_t>(app, s, "--seed", "null simulation seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.null_sim.seed = v; });
    flag<std::string>(app, s, "--null-scheme", "shuffle_points or iid_resample",
                      [](RunConfig& c, const std::string& v) { c.null_sim.scheme = null_scheme_from_string(v); });
    flag<unsigned>(app, s, "--threads", "worker threads (0 = all cores)",
                   [](RunConfig& c, const unsigned& v) { c.null_sim.threads = v; });
    flag<double>(app, s, "--alpha-level", "test significance level",
                 [](RunConfig& c, const double& v) { c.alpha_level = v; });
}

void model_flags(CLI::App* app, Settings& s)
{
    flag<int>(app, s, "--rounds", "boosting rounds", [](RunConfig& c, const int& v) { c.boosting.n_rounds = v; });
    flag<double>(app, s, "--learning-rate", "shrinkage",
                 [](RunConfig& c, const double& v) { c.boosting.learning_rate = v; });
    flag<int>(app, s, "--max-depth", "tree depth", [](RunConfig& c, const int& v) { c.boosting.max_depth = v; });
    flag<double>(app, s, "--lambda", "L2 leaf penalty", [](RunConfig& c, const double& v) { c.boosting.lambda = v; });
    flag<double>(app, s, "--gamma", "minimum split gain", [](RunConfig& c, const double& v) { c.boosting.gamma = v; });
    flag<double>(app, s, "--min-child-weight", "minimum rows per child",
                 [](RunConfig& c, const double& v) { c.boosting.min_child_weight = v; });
    flag<double>(app, s, "--subsample", "row subsample per tree",
                 [](RunConfig& c, const double& v) { c.boosting.subsample = v; });
    flag<std::uint64_t>(app, s, "--model-seed", "boosting seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.boosting.seed = v; });
    flag<double>(app, s, "--base-score", "initial prediction (default: target mean)",
                 [](RunConfig& c, const double& v) { c.boosting.base_score = v; });
    flag<double>(app, s, "--train-fraction", "training share",
                 [](RunConfig& c, const double& v) { c.split.train_fraction = v; });
    flag<std::string>(app, s, "--split", "by_point_random or by_match",
                      [](RunConfig& c, const std::string& v) { c.split.scheme = split_scheme_from_string(v); });
    flag<std::uint64_t>(app, s, "--split-seed", "split seed",
                        [](RunConfig& c, const std::uint64_t& v) { c.split.seed = v; });
    flag<std::string>(app, s, "--view", "p1, p2 or both",
                      [](RunConfig& c, const std::string& v) { c.view = player_view_from_string(v); });
}

void emit(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_atomic(path, content);
    }
}

void print_warnings(const LoadedInputs& in)
{
    for (const auto& w : in.warnings) std::cerr << "warning: " << w << '\n';
}

LoadedInputs load(const RunConfig& cfg)
{
    auto in = load_inputs(cfg.inputs, cfg.schema);
    print_warnings(in);
    return in;
}

std::pair<std::string, std::string> parse_pair(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "pair '" + s + "' must be feature:color_by");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

int run(int argc, char** argv)
{
    CLI::App app{"Momentum scoring and analysis for point-by-point tennis data"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ingest
    Settings ingest_s;
    std::string ingest_out, ingest_indicators;
    auto* ingest = app.add_subcommand("ingest", "parse and validate point-by-point files");
    input_flags(ingest, ingest_s);
    flag<int>(ingest, ingest_s, "--window", "indicator window", [](RunConfig& c, const int& v) { c.scoring.window = v; });
    ingest->add_option("--out", ingest_out, "rewrite the parsed data as CSV");
    ingest->add_option("--emit-indicators", ingest_indicators, "write windowed indicators as CSV");
    ingest->callback([&] {
        action = [&] {
            const RunConfig cfg = ingest_s.resolve();
            const auto in = load(cfg);
            std::size_t points = 0, violations = 0;
            for (const auto& m : in.matches) {
                points += m.points.size();
                for (const auto& v : validate(m)) {
                    ++violations;
                    std::cerr << m.match_id << " point " << v.point_no << ": " << v.rule_id << ": " << v.message << '\n';
                }
            }
            std::cout << in.matches.size() << " matches, " << points << " points, " << in.dropped_rows
                      << " dropped rows, " << violations << " violations\n";
            if (!ingest_out.empty()) {
                std::ostringstream out;
                write_csv(out, in.matches, in.extra_columns);
                emit(ingest_out, out.str());
            }
            if (!ingest_indicators.empty()) {
                const auto specs = default_indicator_specs(cfg.scoring.window);
                std::ostringstream out;
                bool header = true;
                for (const auto& m : in.matches) {
                    for (Player p : {Player::P1, Player::P2}) {
                        std::ostringstream block;
                        write_indicator_csv(block, compute_indicators(m, p, specs));
                        std::string text = block.str();
                        if (!header) text.erase(0, text.find('\n') + 1);
                        header = false;
                        out << text;
                    }
                }
                emit(ingest_indicators, out.str());
            }
            return violations ? 1 : 0;
        };
    });

    // score
    Settings score_s;
    std::string score_out, score_weights;
    auto* score = app.add_subcommand("score", "entropy weights, grey degrees and performance scores");
    input_flags(score, score_s);
    scoring_flags(score, score_s);
    score->add_option("--out", score_out, "scores CSV (default stdout)");
    score->add_option("--emit-weights", score_weights, "weights JSON");
    score->callback([&] {
        action = [&] {
            const RunConfig cfg = score_s.resolve();
            check_params(cfg.scoring);
            const auto in = load(cfg);
            const auto scores = score_matches(in.matches, cfg.scoring);
            emit(score_out, scores_csv(scores));
            if (!score_weights.empty()) emit(score_weights, weights_json(scores));
            return 0;
        };
    });

    // momentum
    Settings mom_s;
    std::string mom_out;
    auto* mom = app.add_subcommand("momentum", "smoothed momentum and swing labels");
    input_flags(mom, mom_s);
    scoring_flags(mom, mom_s);
    mom->add_option("--out", mom_out, "momentum CSV (default stdout)");
    mom->callback([&] {
        action = [&] {
            const RunConfig cfg = mom_s.resolve();
            check_params(cfg.scoring);
            const auto in = load(cfg);
            emit(mom_out, momentum_csv(score_matches(in.matches, cfg.scoring)));
            return 0;
        };
    });

    // validate
    Settings val_s;
    std::string val_out;
    auto* val = app.add_subcommand("validate", "test momentum against randomized matches");
    input_flags(val, val_s);
    scoring_flags(val, val_s);
    null_flags(val, val_s);
    val->add_option("--out", val_out, "validation JSON (default stdout)");
    val->callback([&] {
        action = [&] {
            const RunConfig cfg = val_s.resolve();
            check_config(cfg);
            const auto in = load(cfg);
            const auto v = validate_momentum(in.matches, cfg.null_sim, cfg.scoring, cfg.alpha_level);
            emit(val_out, validation_json(v));
            std::cerr << "Mann-Whitney p = " << v.report.p_mwu << (v.report.reject_mwu ? " (reject)" : "")
                      << ", KS p = " << v.report.p_ks << (v.report.reject_ks ? " (reject)" : "") << '\n';
            return 0;
        };
    });

    // train
    Settings train_s;
    std::string train_model = "model.json", train_eval;
    auto* train_cmd = app.add_subcommand("train", "fit the boosted-tree momentum model");
    input_flags(train_cmd, train_s);
    scoring_flags(train_cmd, train_s);
    model_flags(train_cmd, train_s);
    train_cmd->add_option("--model", train_model, "model output path");
    train_cmd->add_option("--eval", train_eval, "evaluation JSON (default stdout)");
    train_cmd->callback([&] {
        action = [&] {
            const RunConfig cfg = train_s.resolve();
            check_config(cfg);
            const auto in = load(cfg);
            const auto frame = frame_for(in.matches, cfg.scoring, cfg.view);
            auto [model, report] = fit(frame, cfg.boosting, cfg.split);
            std::ostringstream out;
            write_model(out, {model, cfg.scoring, cfg.view});
            emit(train_model, out.str());
            emit(train_eval, eval_json(report, cfg.view));
            return 0;
        };
    });

    // evaluate
    Settings eval_s;
    std::string eval_model = "model.json", eval_out;
    bool eval_all = false;
    auto* eval = app.add_subcommand("evaluate", "score a saved model on held-out rows");
    input_flags(eval, eval_s);
    model_flags(eval, eval_s);
    eval->add_option("--model", eval_model, "model path");
    eval->add_flag("--all", eval_all, "evaluate on every row instead of the held-out split");
    eval->add_option("--out", eval_out, "evaluation JSON (default stdout)");
    eval->callback([&] {
        action = [&] {
            const RunConfig cfg = eval_s.resolve();
            const ModelFile mf = load_model(eval_model);
            const auto in = load(cfg);
            const auto frame = frame_for(in.matches, mf.scoring.value_or(ScoringParams{}), mf.view);
            std::vector<std::size_t> train_rows, test_rows;
            if (eval_all) {
                test_rows.resize(frame.size());
                std::iota(test_rows.begin(), test_rows.end(), std::size_t{0});
            } else {
                const auto split = split_frame(frame, cfg.split);
                train_rows = split.train;
                test_rows = split.test;
            }
            auto report = evaluate(mf.model, frame, train_rows, test_rows);
            report.split = cfg.split;
            emit(eval_out, eval_json(report, mf.view));
            return 0;
        };
    });

    // explain
    Settings explain_s;
    std::string explain_model = "model.json", explain_dir = "explain";
    std::vector<std::string> explain_pairs;
    auto* explain = app.add_subcommand("explain", "TreeSHAP attributions, importance and dependence pairs");
    input_flags(explain, explain_s);
    explain->add_option("--model", explain_model, "model path");
    explain->add_option("--out-dir", explain_dir, "output directory");
    explain->add_option("--pair", explain_pairs, "feature:color_by (repeatable; default the six standard panels)");
    explain->callback([&] {
        action = [&] {
            const RunConfig cfg = explain_s.resolve();
            const ModelFile mf = load_model(explain_model);
            auto pairs = cfg.dependence;
            if (!explain_pairs.empty()) {
                pairs.clear();
                for (const auto& p : explain_pairs) pairs.push_back(parse_pair(p));
            }
            const auto in = load(cfg);
            const auto frame = frame_for(in.matches, mf.scoring.value_or(ScoringParams{}), mf.view);
            for (const auto& [f, c] : pairs) {
                frame.feature_index(f);
                frame.feature_index(c);
            }
            const auto shap = tree_shap(mf.model, frame.rows);
            const fs::path dir = explain_dir;
            write_atomic(dir / "shap.csv", shap_csv(shap, frame));
            write_atomic(dir / "importance.json", importance_json(importance(shap), shap.base_value));
            for (const auto& [f, c] : pairs) {
                write_atomic(dir / "dependence" / (f + "_vs_" + c + ".csv"),
                             dependence_csv(dependence_pairs(shap, frame, f, c), f, c));
            }
            return 0;
        };
    });

    // generalize
    Settings gen_s;
    std::string gen_model = "model.json", gen_out;
    std::optional<double> gen_in_domain;
    auto* gen = app.add_subcommand("generalize", "evaluate a saved model on other tournaments without refitting");
    gen->add_option("--config", gen_s.config_path, "JSON run configuration");
    gen->add_option_function<std::vector<std::string>>(
        "datasets",
        [&gen_s](const std::vector<std::string>& v) {
            gen_s.overrides.push_back([v](RunConfig& c) { c.external.assign(v.begin(), v.end()); });
        },
        "external point-by-point CSV files");
    gen->add_option("--model", gen_model, "model path");
    gen->add_option("--in-domain-r2", gen_in_domain, "in-domain test R2 to report alongside");
    gen->add_option("--out", gen_out, "generalization JSON (default stdout)");
    gen->callback([&] {
        action = [&] {
            const RunConfig cfg = gen_s.resolve();
            const ModelFile mf = load_model(gen_model);
            auto report = generalize(mf, cfg.external);
            report.in_domain_r2 = gen_in_domain;
            emit(gen_out, generalization_json(report));
            std::cerr << report.datasets.size() << " external datasets evaluated\n";
            return 0;
        };
    });

    // stability
    Settings stab_s;
    std::string stab_out;
    auto* stab = app.add_subcommand("stability", "sweep the serve advantage factor");
    input_flags(stab, stab_s);
    scoring_flags(stab, stab_s);
    flag<std::vector<double>>(stab, stab_s, "--grid", "serve factor values",
                              [](RunConfig& c, const std::vector<double>& v) { c.xi_grid = v; });
    flag<std::string>(stab, stab_s, "--match", "match id (default: first match)",
                      [](RunConfig& c, const std::string& v) { c.stability_match = v; });
    flag<std::string>(stab, stab_s, "--player", "p1 or p2", [](RunConfig& c, const std::string& v) {
        if (v != "p1" && v != "p2") throw Error(Errc::InvalidArgument, "--player must be p1 or p2");
        c.stability_player = v == "p1" ? Player::P1 : Player::P2;
    });
    stab->add_option("--out", stab_out, "stability JSON (default stdout)");
    stab->callback([&] {
        action = [&] {
            const RunConfig cfg = stab_s.resolve();
            check_params(cfg.scoring);
            const auto in = load(cfg);
            const auto r = stability_sweep(in.matches, cfg.scoring, cfg.xi_grid, cfg.stability_match,
                                           cfg.stability_player);
            emit(stab_out, stability_json(r));
            std::cerr << "range " << r.range_of_output << ", variance of differences " << r.variance_of_differences
                      << '\n';
            return 0;
        };
    });

    // run-all
    Settings all_s;
    auto* all = app.add_subcommand("run-all", "every stage, with a manifest");
    input_flags(all, all_s);
    scoring_flags(all, all_s);
    null_flags(all, all_s);
    model_flags(all, all_s);
    flag<std::string>(all, all_s, "--out-dir", "output directory",
                      [](RunConfig& c, const std::string& v) { c.output_dir = v; });
    flag<std::vector<std::string>>(all, all_s, "--external", "external tournament files",
                                   [](RunConfig& c, const std::vector<std::string>& v) {
                                       c.external.assign(v.begin(), v.end());
                                   });
    flag<std::vector<double>>(all, all_s, "--grid", "serve factor values for the stability sweep",
                              [](RunConfig& c, const std::vector<double>& v) { c.xi_grid = v; });
    all->callback([&] {
        action = [&] {
            const RunConfig cfg = all_s.resolve();
            const auto s = run_all(cfg);
            std::cout << "wrote " << s.files.size() << " files to " << cfg.output_dir.string() << '\n';
            std::cout << "momentum tests: Mann-Whitney p = " << s.validation.report.p_mwu
                      << ", KS p = " << s.validation.report.p_ks << '\n';
            std::cout << "test R2 = " << s.eval.test.r2 << '\n';
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return action();
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_config_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
