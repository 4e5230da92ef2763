#include "foldlab/error.hpp"

namespace foldlab {

std::string_view code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidSpec: return "invalid_spec";
    case ErrorCode::InvalidAction: return "invalid_action";
    case ErrorCode::NothingGrasped: return "nothing_grasped";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::NoSuchSlot: return "no_such_slot";
    case ErrorCode::SessionFinished: return "session_finished";
    case ErrorCode::PairLocked: return "pair_locked";
    case ErrorCode::CommandDisabled: return "command_disabled";
    case ErrorCode::NothingToSimulate: return "nothing_to_simulate";
    case ErrorCode::NothingToUndo: return "nothing_to_undo";
    case ErrorCode::MarkersIncomplete: return "markers_incomplete";
    case ErrorCode::EmptyImage: return "empty_image";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NoFoldCompleted: return "no_fold_completed";
    case ErrorCode::Empty: return "empty";
    case ErrorCode::IncompleteDesign: return "incomplete_design";
    case ErrorCode::TooFewSubjects: return "too_few_subjects";
    case ErrorCode::SchemaError: return "schema_error";
    case ErrorCode::DivergentLog: return "divergent_log";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::IoError: return "io_error";
    }
    return "unknown";
}

} // namespace foldlab
