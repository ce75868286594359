#include "scenario_forge/error.hpp"

namespace sforge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Io: return "IO";
        case ErrorCode::Config: return "CONFIG";
        case ErrorCode::MissingColumn: return "MISSING_COLUMN";
        case ErrorCode::GapInSeries: return "GAP_IN_SERIES";
        case ErrorCode::DuplicateHour: return "DUPLICATE_HOUR";
        case ErrorCode::UnparseableValue: return "UNPARSEABLE_VALUE";
        case ErrorCode::InsufficientHistory: return "INSUFFICIENT_HISTORY";
        case ErrorCode::InsufficientData: return "INSUFFICIENT_DATA";
        case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
        case ErrorCode::InstanceTooLarge: return "INSTANCE_TOO_LARGE";
        case ErrorCode::DegenerateData: return "DEGENERATE_DATA";
        case ErrorCode::SchemaViolation: return "SCHEMA_VIOLATION";
        case ErrorCode::QuantileCrossing: return "QUANTILE_CROSSING";
        case ErrorCode::HorizonMismatch: return "HORIZON_MISMATCH";
        case ErrorCode::InsufficientMembers: return "INSUFFICIENT_MEMBERS";
        case ErrorCode::MissingProduct: return "MISSING_PRODUCT";
        case ErrorCode::PoolTooSmall: return "POOL_TOO_SMALL";
        case ErrorCode::EmptyRun: return "EMPTY_RUN";
        case ErrorCode::InfeasibleDiscretization: return "INFEASIBLE_DISCRETIZATION";
        case ErrorCode::DataGap: return "DATA_GAP";
    }
    return "UNKNOWN";
}

}  // namespace sforge
