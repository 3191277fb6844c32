#pragma once

#include <stdexcept>
#include <string>

namespace outsideview {

// Every failure the library reports, in one closed set. CLI exit codes and
// report degradation logic dispatch on these, so additions are a contract change.
enum class ErrorCode {
    MalformedRow,             // CSV row unreadable; message carries row and column
    DuplicateProjectId,
    NonPositiveForecast,
    UnknownProjectId,         // ramp-up row references a project absent from the class
    DuplicateYearIndex,       // same (project, year) twice in ramp-up data
    InsufficientData,
    NonMonotoneQuantiles,
    OutOfTableRange,          // summary-mode quantile outside the stored span
    SummaryOnlyDistribution,  // operation needs raw samples
    ZeroAccuracy,             // no finite overestimate exists for accuracy 0
    NoOverestimatedSamples,
    DegenerateConfidence,     // downside confidence <= 0.5 has no usable normal quantile
    InconsistentDownsideClaim,
    NoRampUpData,
    MissingCoreFindings,      // due diligence cannot conclude without steps 2-3
    OutOfDomain,              // numeric argument outside the function's domain
    BadInput,                 // any other precondition violation on caller input
};

inline const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateProjectId: return "DuplicateProjectId";
        case ErrorCode::NonPositiveForecast: return "NonPositiveForecast";
        case ErrorCode::UnknownProjectId: return "UnknownProjectId";
        case ErrorCode::DuplicateYearIndex: return "DuplicateYearIndex";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NonMonotoneQuantiles: return "NonMonotoneQuantiles";
        case ErrorCode::OutOfTableRange: return "OutOfTableRange";
        case ErrorCode::SummaryOnlyDistribution: return "SummaryOnlyDistribution";
        case ErrorCode::ZeroAccuracy: return "ZeroAccuracy";
        case ErrorCode::NoOverestimatedSamples: return "NoOverestimatedSamples";
        case ErrorCode::DegenerateConfidence: return "DegenerateConfidence";
        case ErrorCode::InconsistentDownsideClaim: return "InconsistentDownsideClaim";
        case ErrorCode::NoRampUpData: return "NoRampUpData";
        case ErrorCode::MissingCoreFindings: return "MissingCoreFindings";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace outsideview
