#include "lrfr/error.hpp"

namespace lrfr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::DuplicateGallery: return "DuplicateGallery";
        case ErrorCode::UnknownProbeSubject: return "UnknownProbeSubject";
        case ErrorCode::DuplicateImageId: return "DuplicateImageId";
        case ErrorCode::InvalidRatio: return "InvalidRatio";
        case ErrorCode::EmptyCrop: return "EmptyCrop";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::EncodeError: return "EncodeError";
        case ErrorCode::InvalidDims: return "InvalidDims";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::VersionUnsupported: return "VersionUnsupported";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::NonFiniteEmbedding: return "NonFiniteEmbedding";
        case ErrorCode::UnknownBackend: return "UnknownBackend";
        case ErrorCode::MissingEmbedding: return "MissingEmbedding";
        case ErrorCode::DegenerateEmbedding: return "DegenerateEmbedding";
        case ErrorCode::DuplicateSubject: return "DuplicateSubject";
        case ErrorCode::EmptyResults: return "EmptyResults";
        case ErrorCode::InconsistentGallery: return "InconsistentGallery";
        case ErrorCode::SubsetTooLarge: return "SubsetTooLarge";
        case ErrorCode::MissingBox: return "MissingBox";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace lrfr
