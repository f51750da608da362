#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tennis {

enum class Errc {
    // data errors
    MissingColumn,
    MalformedRow,
    EmptyFile,
    WindowTooLarge,
    EmptyMatrix,
    ZeroMeanColumn,
    LayoutMismatch,
    EmptySeries,
    LengthMismatch,
    TooFewRows,
    NonFiniteTarget,
    DimensionMismatch,
    EmptyTestSet,
    MissingMomentum,
    MissingCover,
    SchemaIncompatible,
    // configuration errors
    UnknownIndicator,
    XiOutOfRange,
    UnknownFeature,
    EmptyGrid,
    InvalidArgument,
};

const char* errc_name(Errc code) noexcept;

/// Configuration problems map to exit code 2 in the CLI, everything else to 1.
bool is_config_error(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    Errc code() const noexcept { return code_; }
    /// 1-based input line for MalformedRow.
    std::optional<std::size_t> line() const noexcept { return line_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
    std::optional<std::size_t> line_;
};

} // namespace tennis
