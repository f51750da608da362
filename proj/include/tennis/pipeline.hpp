#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tennis/attribution.hpp"
#include "tennis/boosting.hpp"
#include "tennis/match_data.hpp"
#include "tennis/model_io.hpp"
#include "tennis/scoring.hpp"
#include "tennis/stats.hpp"

namespace tennis {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    std::filesystem::path output_dir = "out";
    SchemaMode schema = SchemaMode::Strict;
    ScoringParams scoring;
    NullSimConfig null_sim;
    double alpha_level = 0.05;
    BoostParams boosting;
    SplitSpec split;
    PlayerView view = PlayerView::Both;
    std::vector<std::pair<std::string, std::string>> dependence = default_dependence_pairs();
    std::vector<std::filesystem::path> external;
    std::vector<double> xi_grid = {0.05, 0.075, 0.10, 0.125, 0.15};
    /// Match used by the stability sweep; the first input match when empty.
    std::string stability_match;
    Player stability_player = Player::P1;
};

/// Throws XiOutOfRange, EmptyGrid or InvalidArgument; no file is touched.
void check_config(const RunConfig& cfg);

/// JSON form of a config. Keys mirror the CLI flags.
std::string config_to_json(const RunConfig& cfg);
/// Keys absent from the document keep their values in `base`. Unknown keys
/// and ill-typed values throw InvalidArgument.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

struct LoadedInputs {
    std::vector<MatchData> matches;
    std::vector<std::string> extra_columns;
    std::vector<std::string> warnings;
    std::size_t dropped_rows = 0;
};

/// Parses every input in order and concatenates the matches.
LoadedInputs load_inputs(std::span<const std::filesystem::path> paths, SchemaMode mode);

std::vector<PerPlayer<MomentumSeries>> momentum_of(const ScoreResult& scores);

/// Feature frame for matches scored with `scoring`.
FeatureFrame frame_for(std::span<const MatchData> matches, const ScoringParams& scoring, PlayerView view);

struct GeneralizationEntry {
    std::string name;
    std::size_t n_points = 0;
    Metrics metrics;
    std::optional<double> swing_accuracy;
};

struct GeneralizationReport {
    std::optional<double> in_domain_r2;
    std::vector<GeneralizationEntry> datasets;
};

/// Evaluate a fitted model on each dataset with the scoring constants it was
/// trained with. No refitting. Files are parsed leniently; a file missing
/// required columns throws SchemaIncompatible.
GeneralizationReport generalize(const ModelFile& model, std::span<const std::filesystem::path> datasets);

struct StabilityReport {
    std::vector<double> xi_grid;
    std::string match_id;
    Player player = Player::P1;
    std::vector<int> point_no;
    /// One performance series per grid value.
    std::vector<std::vector<double>> scores;
    /// max over points of (max over xi of S - min over xi of S).
    double range_of_output = 0.0;
    /// Population variance over points of S(xi max) - S(xi min).
    double variance_of_differences = 0.0;
};

/// Throws EmptyGrid, XiOutOfRange, or InvalidArgument for an unknown match.
StabilityReport stability_sweep(std::span<const MatchData> matches, const ScoringParams& scoring,
                                std::vector<double> grid, const std::string& match_id = {},
                                Player player = Player::P1);

/// Output writers shared by the CLI subcommands and run_all.
std::string weights_json(const ScoreResult& scores);
std::string scores_csv(const ScoreResult& scores);
std::string momentum_csv(const ScoreResult& scores);
std::string validation_json(const MomentumValidation& v);
std::string eval_json(const EvalReport& r, PlayerView view);
std::string shap_csv(const ShapMatrix& shap, const FeatureFrame& frame);
std::string importance_json(const ImportanceReport& r, double base_value);
std::string dependence_csv(const std::vector<DependencePoint>& points, const std::string& feature,
                           const std::string& color_by);
std::string generalization_json(const GeneralizationReport& r);
std::string stability_json(const StabilityReport& r);

/// Write via a temporary file and rename, creating parent directories.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

struct RunSummary {
    /// Paths relative to the output directory, sorted.
    std::vector<std::string> files;
    MomentumValidation validation;
    EvalReport eval;
    ImportanceReport importance;
    GeneralizationReport generalization;
    StabilityReport stability;
};

/// ingest, indicators, weights, grey scores, momentum, validation, training,
/// attribution, generalization and the stability sweep; every output goes
/// under cfg.output_dir and is listed in manifest.json. Module errors are
/// rethrown with the stage name prepended.
RunSummary run_all(const RunConfig& cfg);

} // namespace tennis
