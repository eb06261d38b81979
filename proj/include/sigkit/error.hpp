#pragma once

#include <stdexcept>
#include <string>

namespace sigkit {

// Stable error names; the CLI prints name() and maps any Error to exit code 1.
enum class Errc {
    FileNotFound,
    MalformedImage,
    MalformedModel,
    IoFailure,
    NoInk,
    OutOfBounds,
    DimensionMismatch,
    ConstantImage,
    DegenerateRange,
    BlockTooLarge,
    NonPositiveWidth,
    DuplicateConflict,
    SingularSystem,
    NonFiniteCost,
    InkClipped,
    EmptyDirectory,
    InvalidArgument,
};

inline const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::FileNotFound:      return "FileNotFound";
    case Errc::MalformedImage:    return "MalformedImage";
    case Errc::MalformedModel:    return "MalformedModel";
    case Errc::IoFailure:         return "IoFailure";
    case Errc::NoInk:             return "NoInk";
    case Errc::OutOfBounds:       return "OutOfBounds";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ConstantImage:     return "ConstantImage";
    case Errc::DegenerateRange:   return "DegenerateRange";
    case Errc::BlockTooLarge:     return "BlockTooLarge";
    case Errc::NonPositiveWidth:  return "NonPositiveWidth";
    case Errc::DuplicateConflict: return "DuplicateConflict";
    case Errc::SingularSystem:    return "SingularSystem";
    case Errc::NonFiniteCost:     return "NonFiniteCost";
    case Errc::InkClipped:        return "InkClipped";
    case Errc::EmptyDirectory:    return "EmptyDirectory";
    case Errc::InvalidArgument:   return "InvalidArgument";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& detail)
{
    throw Error(code, detail);
}

} // namespace sigkit
