#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "tennis/boosting.hpp"
#include "tennis/scoring.hpp"

namespace tennis {

inline constexpr int kModelFormatVersion = 1;

/// A fitted ensemble plus the scoring constants its target was built with.
struct ModelFile {
    TreeEnsemble model;
    std::optional<ScoringParams> scoring;
    PlayerView view = PlayerView::Both;
};

/// Versioned JSON: trees, parameters, feature names and code tables. Doubles
/// are written in shortest round-trip form, so a reload predicts bit-identically.
void write_model(std::ostream& out, const ModelFile& file);

/// Throws SchemaIncompatible for an unknown format or version, and
/// MalformedRow for a document that does not parse.
ModelFile read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

} // namespace tennis
