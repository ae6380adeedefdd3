#pragma once

#include <stdexcept>
#include <string>

namespace revana {

enum class ErrorCode {
    MissingColumn,
    MalformedRow,
    NonMonotonicRevision,
    EventOutOfCalendar,
    EmptyCohort,
    WindowTooLarge,
    EvenWindow,
    SeriesTooShort,
    OutOfScaleItem,
    DegenerateVariance,
    TooFewPoints,
    AllPointsIdentical,
    AllZeroDifferences,
    TooFewPairs,
    EmptySample,
    ZeroVariance,
    ZeroMarginal,
    EmptyGroup,
    MismatchedIds,
    UnboundSlot,
    InvalidCalendar,
    InvalidArgument,
    Io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the whole library; the code tells callers
/// which contract was violated, the message carries the details.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonMonotonicRevision: return "NonMonotonicRevision";
        case ErrorCode::EventOutOfCalendar: return "EventOutOfCalendar";
        case ErrorCode::EmptyCohort: return "EmptyCohort";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::EvenWindow: return "EvenWindow";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::OutOfScaleItem: return "OutOfScaleItem";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::AllPointsIdentical: return "AllPointsIdentical";
        case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
        case ErrorCode::TooFewPairs: return "TooFewPairs";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::ZeroMarginal: return "ZeroMarginal";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::MismatchedIds: return "MismatchedIds";
        case ErrorCode::UnboundSlot: return "UnboundSlot";
        case ErrorCode::InvalidCalendar: return "InvalidCalendar";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace revana
