#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tennis/boosting.hpp"
#include "tennis/matrix.hpp"

namespace tennis {

struct ShapMatrix {
    /// n x d attributions.
    Matrix values;
    /// Cover-weighted expected model output.
    double base_value = 0.0;
    std::vector<std::string> feature_names;
};

/// Exact path-dependent TreeSHAP using the training cover stored in each
/// node as the background distribution. Throws MissingCover when a node has
/// no positive cover and DimensionMismatch for rows of the wrong width.
ShapMatrix tree_shap(const TreeEnsemble& model, const Matrix& rows);

/// Cover-weighted expected output of a model, the SHAP base value.
double expected_value(const TreeEnsemble& model);

struct ImportanceReport {
    /// (feature, mean |phi|), descending; ties keep feature order.
    std::vector<std::pair<std::string, double>> ranking;
};

ImportanceReport importance(const ShapMatrix& shap);

struct DependencePoint {
    double x = 0.0;
    double phi = 0.0;
    double color = 0.0;
};

/// Per row: the value of `feature`, its attribution and the value of
/// `color_by`. Throws UnknownFeature.
std::vector<DependencePoint> dependence_pairs(const ShapMatrix& shap, const FeatureFrame& frame,
                                              const std::string& feature, const std::string& color_by);

/// Default (feature, color_by) panels.
const std::vector<std::pair<std::string, std::string>>& default_dependence_pairs();

} // namespace tennis
