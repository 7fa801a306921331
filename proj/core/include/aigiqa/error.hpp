#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aigiqa {

enum class ErrorCode {
    // prompt model
    CategoryTooLong,
    EmptyCategorySet,
    NonFiniteFeature,
    ShapeMismatch,
    WidthMismatch,
    NonFiniteScore,
    EmptyBatch,
    // zero-shot baseline
    ZeroVector,
    // metrics
    DegenerateSeries,
    // data pipeline
    MissingColumn,
    OutOfRangeLabel,
    DuplicateRecord,
    UnreadableImage,
    EmptySplit,
    ZeroRange,
    DecodeFailure,
    MalformedManifest,
    // training
    EpochOutOfRange,
    NonFiniteLoss,
    InvalidConfig,
    InvalidCheckpoint,
    BackboneMismatch,
    BackboneUnavailable,
    // harness
    InvalidVariantParams,
    EmptyReportList,
    UnwritablePath,
    MalformedReport,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. Every failure raised by the
/// library is an `Error`; the CLI maps it to a structured message on stderr.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string & message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace aigiqa
