#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tennis/match_data.hpp"
#include "tennis/matrix.hpp"
#include "tennis/momentum.hpp"

namespace tennis {

enum class PlayerView { P1, P2, Both };

const char* to_string(PlayerView v) noexcept;
PlayerView player_view_from_string(const std::string& s);

/// Integer codes used for categorical point fields.
struct CodeTable {
    std::string feature;
    std::vector<std::pair<std::string, int>> codes;
};

/// Feature columns, in frame order. Names without a prefix describe the focal
/// player; `opponent_` columns describe the other one. Player-valued fields
/// (server, point_victor, game_victor, set_victor) are coded 0 = none,
/// 1 = focal, 2 = opponent.
const std::vector<std::string>& feature_names();
const std::vector<CodeTable>& code_tables();

/// One row per point per viewed player.
struct FeatureFrame {
    Matrix rows;
    std::vector<std::string> names;
    std::vector<double> target;
    std::vector<std::string> match_ids;
    /// Per row: index into match_ids, point number and focal player.
    std::vector<std::size_t> match_index;
    std::vector<int> point_no;
    std::vector<Player> view;

    std::size_t size() const noexcept { return target.size(); }
    /// Throws UnknownFeature.
    std::size_t feature_index(const std::string& name) const;
};

/// Rows are ordered by match, then view (P1 before P2), then point. Missing
/// serve speeds are imputed the same way as for the indicators. The target
/// is the focal player's momentum at the point.
FeatureFrame build_features(std::span<const MatchData> matches, std::span<const PerPlayer<MomentumSeries>> momentum,
                            PlayerView view = PlayerView::Both);

struct BoostParams {
    int n_rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 5;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    double subsample = 1.0;
    std::uint64_t seed = 42;
    /// Training-target mean when unset.
    std::optional<double> base_score;
};

void check_params(const BoostParams& params);

struct TreeNode {
    /// -1 for a leaf.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    /// Where a missing (NaN) value goes: the child with the larger cover.
    bool default_left = true;
    double value = 0.0;
    /// Training rows that reached the node.
    double cover = 0.0;
    double gain = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes in preorder; node 0 is the root. x < threshold goes left.
struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const;
    /// Index of the leaf reached by x.
    int leaf(std::span<const double> x) const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeEnsemble {
    std::vector<Tree> trees;
    double learning_rate = 0.1;
    double base_score = 0.0;
    BoostParams params;
    std::vector<std::string> feature_names;

    std::size_t n_features() const noexcept { return feature_names.size(); }
};

/// base_score + learning_rate * sum of tree outputs. Throws DimensionMismatch.
std::vector<double> predict(const TreeEnsemble& model, const Matrix& rows);
double predict_row(const TreeEnsemble& model, std::span<const double> row);

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

/// Best exact greedy split of `rows` given per-row gradients (hessians are
/// all 1). Thresholds sit midway between consecutive distinct values; ties
/// keep the earliest feature and threshold. nullopt when no split satisfies
/// min_child_weight or the best gain is not positive.
std::optional<SplitCandidate> find_best_split(const Matrix& x, std::span<const double> grad,
                                              std::span<const std::size_t> rows, const BoostParams& params);

/// Squared-error boosting on every row of x. Feature values must be finite.
/// When `train_rmse` is given it receives the training RMSE after each round.
TreeEnsemble train(const Matrix& x, std::span<const double> y, const BoostParams& params,
                   std::vector<std::string> feature_names = {}, std::vector<double>* train_rmse = nullptr);

enum class SplitScheme { ByPointRandom, ByMatch };

const char* to_string(SplitScheme s) noexcept;
SplitScheme split_scheme_from_string(const std::string& s);

struct SplitSpec {
    double train_fraction = 0.7;
    SplitScheme scheme = SplitScheme::ByPointRandom;
    std::uint64_t seed = 42;
};

struct FrameSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Throws InvalidArgument for a fraction outside (0, 1) and EmptyTestSet
/// when either side would be empty.
FrameSplit split_frame(const FeatureFrame& frame, const SplitSpec& spec);

struct Metrics {
    std::size_t n = 0;
    double r2 = 0.0;
    double rmse = 0.0;
    /// Targets have zero variance; r2 is then 1 for an exact fit and 0 otherwise.
    bool degenerate = false;
};

/// Throws EmptyTestSet for empty input.
Metrics regression_metrics(std::span<const double> truth, std::span<const double> predicted);

struct EvalReport {
    Metrics train;
    Metrics test;
    /// Share of test points whose predicted swing flag matches the flag from
    /// the true momentum. Needs both views of a match in the frame.
    std::optional<double> swing_accuracy;
    BoostParams params;
    SplitSpec split;
};

/// Metrics for the rows in `test` (and `train`, when non-empty).
EvalReport evaluate(const TreeEnsemble& model, const FeatureFrame& frame, std::span<const std::size_t> train,
                    std::span<const std::size_t> test, double tie_eps = kDefaultTieEps);

/// Split, train on the training rows and evaluate. Throws TooFewRows below
/// 10 rows and NonFiniteTarget for NaN or infinite targets.
std::pair<TreeEnsemble, EvalReport> fit(const FeatureFrame& frame, const BoostParams& params, const SplitSpec& split);

} // namespace tennis
