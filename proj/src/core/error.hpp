#pragma once

#include <stdexcept>
#include <string>

namespace ermm {

// Error categories map onto process exit codes: config=2, data=3, state=2.
enum class ErrorCode {
    // model
    MalformedDefinition,
    DuplicateQuestion,
    DanglingSection,
    // ingestion / filtering
    MissingColumn,
    UnreadableFile,
    FilterSyntax,
    UnknownKey,
    UnreadableSampleFile,
    // clustering
    LengthMismatch,
    EmptyInput,
    // validation
    SampleSetMismatch,
    ClusterExhausted,
    AllClustersVisited,
    // maturity
    WeightSumViolation,
    // manifest
    ManifestMismatch,
    // orchestration
    PhaseOrderViolation,
    UpstreamErrorGate,
    NonConvergence,
    ConfigError,
    InvalidArgument,
};

enum class ErrorCategory { Config, Data, State, Internal };

inline ErrorCategory category_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::FilterSyntax:
    case ErrorCode::UnknownKey:
        return ErrorCategory::Config;
    case ErrorCode::PhaseOrderViolation:
    case ErrorCode::UpstreamErrorGate:
    case ErrorCode::NonConvergence:
        return ErrorCategory::State;
    case ErrorCode::MalformedDefinition:
    case ErrorCode::DuplicateQuestion:
    case ErrorCode::DanglingSection:
    case ErrorCode::MissingColumn:
    case ErrorCode::UnreadableFile:
    case ErrorCode::UnreadableSampleFile:
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyInput:
    case ErrorCode::SampleSetMismatch:
    case ErrorCode::ClusterExhausted:
    case ErrorCode::AllClustersVisited:
    case ErrorCode::WeightSumViolation:
    case ErrorCode::ManifestMismatch:
        return ErrorCategory::Data;
    }
    return ErrorCategory::Internal;
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }
    ErrorCategory category() const { return category_of(code_); }

  private:
    ErrorCode code_;
};

} // namespace ermm
