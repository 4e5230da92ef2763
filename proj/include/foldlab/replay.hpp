#pragma once

#include "foldlab/demo_log.hpp"
#include "foldlab/scoring.hpp"
#include "foldlab/session.hpp"

#include <optional>

namespace foldlab {

struct ReplayResult {
    ClothState final_state;
    Mask mask;
    TrialScore score;
    DemonstrationLog log; // the log produced by the re-driven session
};

/// Re-drives a fresh session with the logged placements and commands, using
/// the logged timestamps as its clock. The configuration comes from the
/// session_start payload unless `config` overrides it. Throws SchemaError for
/// malformed logs and DivergentLog when an event is impossible in sequence.
ReplayResult replay(const DemonstrationLog& log, const std::optional<SessionConfig>& config = std::nullopt);

} // namespace foldlab
