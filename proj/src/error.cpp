#include "tennis/error.hpp"

namespace tennis {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::ZeroMeanColumn: return "ZeroMeanColumn";
    case Errc::LayoutMismatch: return "LayoutMismatch";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::NonFiniteTarget: return "NonFiniteTarget";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyTestSet: return "EmptyTestSet";
    case Errc::MissingMomentum: return "MissingMomentum";
    case Errc::MissingCover: return "MissingCover";
    case Errc::SchemaIncompatible: return "SchemaIncompatible";
    case Errc::UnknownIndicator: return "UnknownIndicator";
    case Errc::XiOutOfRange: return "XiOutOfRange";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool is_config_error(Errc code) noexcept
{
    switch (code) {
    case Errc::UnknownIndicator:
    case Errc::XiOutOfRange:
    case Errc::UnknownFeature:
    case Errc::EmptyGrid:
    case Errc::InvalidArgument:
        return true;
    default:
        return false;
    }
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message), line_(line)
{
}

} // namespace tennis
