#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrfr {

enum class ErrorCode {
    ParseError,
    DuplicateGallery,
    UnknownProbeSubject,
    DuplicateImageId,
    InvalidRatio,
    EmptyCrop,
    DecodeError,
    EncodeError,
    InvalidDims,
    BadMagic,
    VersionUnsupported,
    TruncatedFile,
    DimMismatch,
    NonFiniteEmbedding,
    UnknownBackend,
    MissingEmbedding,
    DegenerateEmbedding,
    DuplicateSubject,
    EmptyResults,
    InconsistentGallery,
    SubsetTooLarge,
    MissingBox,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the toolkit carries a stable code so the CLI can
/// print a machine-parseable `error,<Code>,<message>` line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lrfr
