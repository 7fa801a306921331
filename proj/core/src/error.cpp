#include "aigiqa/error.hpp"

namespace aigiqa {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::CategoryTooLong: return "CategoryTooLong";
        case ErrorCode::EmptyCategorySet: return "EmptyCategorySet";
        case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::NonFiniteScore: return "NonFiniteScore";
        case ErrorCode::EmptyBatch: return "EmptyBatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::OutOfRangeLabel: return "OutOfRangeLabel";
        case ErrorCode::DuplicateRecord: return "DuplicateRecord";
        case ErrorCode::UnreadableImage: return "UnreadableImage";
        case ErrorCode::EmptySplit: return "EmptySplit";
        case ErrorCode::ZeroRange: return "ZeroRange";
        case ErrorCode::DecodeFailure: return "DecodeFailure";
        case ErrorCode::MalformedManifest: return "MalformedManifest";
        case ErrorCode::EpochOutOfRange: return "EpochOutOfRange";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidCheckpoint: return "InvalidCheckpoint";
        case ErrorCode::BackboneMismatch: return "BackboneMismatch";
        case ErrorCode::BackboneUnavailable: return "BackboneUnavailable";
        case ErrorCode::InvalidVariantParams: return "InvalidVariantParams";
        case ErrorCode::EmptyReportList: return "EmptyReportList";
        case ErrorCode::UnwritablePath: return "UnwritablePath";
        case ErrorCode::MalformedReport: return "MalformedReport";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string & message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace aigiqa
