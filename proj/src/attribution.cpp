#include "tennis/attribution.hpp"

#include <algorithm>
#include <cmath>

#include "tennis/error.hpp"

namespace tennis {

namespace {

struct PathElement {
    int feature = -1;
    double zero = 0.0;
    double one = 0.0;
    double weight = 0.0;
};

using Path = std::vector<PathElement>;

void extend(Path& path, int depth, double zero, double one, int feature)
{
    const auto d = static_cast<std::size_t>(depth);
    path[d] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        path[k + 1].weight += one * path[k].weight * (i + 1) / (depth + 1);
        path[k].weight = zero * path[k].weight * (depth - i) / (depth + 1);
    }
}

void unwind(Path& path, int depth, int index)
{
    const double one = path[static_cast<std::size_t>(index)].one;
    const double zero = path[static_cast<std::size_t>(index)].zero;
    double next = path[static_cast<std::size_t>(depth)].weight;
    for (int i = depth - 1; i >= 0; --i) {
        auto& el = path[static_cast<std::size_t>(i)];
        if (one != 0.0) {
            const double tmp = el.weight;
            el.weight = next * (depth + 1) / ((i + 1) * one);
            next = tmp - el.weight * zero * (depth - i) / (depth + 1);
        } else {
            el.weight = el.weight * (depth + 1) / (zero * (depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        auto& el = path[static_cast<std::size_t>(i)];
        const auto& nx = path[static_cast<std::size_t>(i + 1)];
        el.feature = nx.feature;
        el.zero = nx.zero;
        el.one = nx.one;
    }
}

double unwound_sum(const Path& path, int depth, int index)
{
    const double one = path[static_cast<std::size_t>(index)].one;
    const double zero = path[static_cast<std::size_t>(index)].zero;
    double next = path[static_cast<std::size_t>(depth)].weight;
    double total = 0.0;
    for (int i = depth - 1; i >= 0; --i) {
        const double w = path[static_cast<std::size_t>(i)].weight;
        if (one != 0.0) {
            const double tmp = next * (depth + 1) / ((i + 1) * one);
            total += tmp;
            next = w - tmp * zero * (depth - i) / (depth + 1);
        } else if (zero != 0.0) {
            total += w / zero / (static_cast<double>(depth - i) / (depth + 1));
        }
    }
    return total;
}

class TreeExplainer {
public:
    TreeExplainer(const Tree& tree, std::span<const double> x, std::span<double> phi, double scale)
        : tree_(tree), x_(x), phi_(phi), scale_(scale)
    {
    }

    void run()
    {
        Path path(static_cast<std::size_t>(height(0)) + 2);
        recurse(0, path, 0, 1.0, 1.0, -1);
    }

private:
    int height(int index) const
    {
        const auto& n = tree_.nodes[static_cast<std::size_t>(index)];
        return n.is_leaf() ? 0 : 1 + std::max(height(n.left), height(n.right));
    }

    void recurse(int node_index, Path path, int depth, double zero, double one, int feature)
    {
        extend(path, depth, zero, one, feature);
        const auto& node = tree_.nodes[static_cast<std::size_t>(node_index)];
        if (node.is_leaf()) {
            for (int i = 1; i <= depth; ++i) {
                const auto& el = path[static_cast<std::size_t>(i)];
                const double w = unwound_sum(path, depth, i);
                phi_[static_cast<std::size_t>(el.feature)] += scale_ * w * (el.one - el.zero) * node.value;
            }
            return;
        }

        const double v = x_[static_cast<std::size_t>(node.feature)];
        const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
        const int hot = go_left ? node.left : node.right;
        const int cold = go_left ? node.right : node.left;

        double in_zero = 1.0, in_one = 1.0;
        for (int k = 1; k <= depth; ++k) {
            if (path[static_cast<std::size_t>(k)].feature == node.feature) {
                in_zero = path[static_cast<std::size_t>(k)].zero;
                in_one = path[static_cast<std::size_t>(k)].one;
                unwind(path, depth, k);
                --depth;
                break;
            }
        }
        const double cover = node.cover;
        const double hot_share = tree_.nodes[static_cast<std::size_t>(hot)].cover / cover;
        const double cold_share = tree_.nodes[static_cast<std::size_t>(cold)].cover / cover;
        recurse(hot, path, depth + 1, hot_share * in_zero, in_one, node.feature);
        recurse(cold, path, depth + 1, cold_share * in_zero, 0.0, node.feature);
    }

    const Tree& tree_;
    std::span<const double> x_;
    std::span<double> phi_;
    double scale_;
};

void check_cover(const TreeEnsemble& model)
{
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        for (const auto& n : model.trees[t].nodes) {
            if (!(n.cover > 0.0)) throw Error(Errc::MissingCover, "tree " + std::to_string(t) + " lacks node cover");
        }
    }
}

double tree_expectation(const Tree& tree, int index)
{
    const auto& n = tree.nodes[static_cast<std::size_t>(index)];
    if (n.is_leaf()) return n.value;
    const auto& l = tree.nodes[static_cast<std::size_t>(n.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(n.right)];
    return (l.cover * tree_expectation(tree, n.left) + r.cover * tree_expectation(tree, n.right)) / (l.cover + r.cover);
}

} // namespace

double expected_value(const TreeEnsemble& model)
{
    check_cover(model);
    double sum = 0.0;
    for (const auto& t : model.trees) {
        if (!t.nodes.empty()) sum += tree_expectation(t, 0);
    }
    return model.base_score + model.learning_rate * sum;
}

ShapMatrix tree_shap(const TreeEnsemble& model, const Matrix& rows)
{
    check_cover(model);
    const std::size_t d = model.n_features();
    if (rows.rows() > 0 && rows.cols() != d) {
        throw Error(Errc::DimensionMismatch, "rows have " + std::to_string(rows.cols()) + " features, model expects "
                                                 + std::to_string(d));
    }
    ShapMatrix out;
    out.feature_names = model.feature_names;
    out.base_value = expected_value(model);
    out.values = Matrix(rows.rows(), d);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        for (const auto& t : model.trees) {
            if (t.nodes.size() > 1) TreeExplainer(t, rows.row(i), out.values.row(i), model.learning_rate).run();
        }
    }
    return out;
}

ImportanceReport importance(const ShapMatrix& shap)
{
    const std::size_t n = shap.values.rows();
    ImportanceReport r;
    for (std::size_t j = 0; j < shap.feature_names.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += std::abs(shap.values(i, j));
        r.ranking.emplace_back(shap.feature_names[j], n ? sum / static_cast<double>(n) : 0.0);
    }
    std::stable_sort(r.ranking.begin(), r.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return r;
}

std::vector<DependencePoint> dependence_pairs(const ShapMatrix& shap, const FeatureFrame& frame,
                                              const std::string& feature, const std::string& color_by)
{
    const std::size_t x = frame.feature_index(feature);
    const std::size_t c = frame.feature_index(color_by);
    const auto it = std::find(shap.feature_names.begin(), shap.feature_names.end(), feature);
    if (it == shap.feature_names.end()) throw Error(Errc::UnknownFeature, "feature '" + feature + "' not attributed");
    const auto j = static_cast<std::size_t>(it - shap.feature_names.begin());
    if (shap.values.rows() != frame.size()) {
        throw Error(Errc::LengthMismatch, "attributions and frame differ in row count");
    }
    std::vector<DependencePoint> out;
    out.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) out.push_back({frame.rows(i, x), shap.values(i, j), frame.rows(i, c)});
    return out;
}

const std::vector<std::pair<std::string, std::string>>& default_dependence_pairs()
{
    static const std::vector<std::pair<std::string, std::string>> kPairs = {
        {"distance_run", "game_no"},   {"opponent_distance_run", "score"}, {"points_won", "point_no"},
        {"opponent_points_won", "point_no"}, {"point_no", "points_won"},  {"game_no", "server"},
    };
    return kPairs;
}

} // namespace tennis
