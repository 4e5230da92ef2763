#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace foldlab {

/// Machine-readable failure categories shared by the library, the CLI and the
/// wire protocol. The snake_case names returned by code_name() are the
/// protocol's error codes.
enum class ErrorCode {
    InvalidSpec,
    InvalidAction,
    NothingGrasped,
    InvalidConfig,
    NoSuchSlot,
    SessionFinished,
    PairLocked,
    CommandDisabled,
    NothingToSimulate,
    NothingToUndo,
    MarkersIncomplete,
    EmptyImage,
    DimensionMismatch,
    NoFoldCompleted,
    Empty,
    IncompleteDesign,
    TooFewSubjects,
    SchemaError,
    DivergentLog,
    BadRequest,
    UnknownSession,
    IoError,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace foldlab
