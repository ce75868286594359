#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sforge {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Config,
    MissingColumn,
    GapInSeries,
    DuplicateHour,
    UnparseableValue,
    InsufficientHistory,
    InsufficientData,
    DimensionMismatch,
    InstanceTooLarge,
    DegenerateData,
    SchemaViolation,
    QuantileCrossing,
    HorizonMismatch,
    InsufficientMembers,
    MissingProduct,
    PoolTooSmall,
    EmptyRun,
    InfeasibleDiscretization,
    DataGap,
};

/// Stable upper-snake identifier, used as the `ERROR:<code>:` prefix by the CLI.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code),
          detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace sforge
