#pragma once

#include <stdexcept>
#include <string>

namespace gazescreen {

// Base for all data/runtime failures raised by the toolkit. The CLI maps
// these to exit code 1; flag/usage problems map to exit code 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoFailure : Error { using Error::Error; };
struct MalformedHeader : Error { using Error::Error; };
struct MalformedRow : Error { using Error::Error; };
struct NonMonotonicTime : Error { using Error::Error; };
struct SchemaViolation : Error { using Error::Error; };
struct RowSumViolation : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct ZeroTimestep : Error { using Error::Error; };
struct EmptyRecording : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct NonFiniteInput : Error { using Error::Error; };
struct DivergedLoss : Error { using Error::Error; };
struct InsufficientClassMembers : Error { using Error::Error; };
struct DegenerateProfile : Error { using Error::Error; };

}  // namespace gazescreen
