#pragma once

#include "foldlab/config.hpp"
#include "foldlab/demo_log.hpp"
#include "foldlab/fold.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace foldlab {

enum class MarkerKind { Pick, Place };
enum class Command { Simulate, Fold, Undo, Reset };

std::string_view marker_name(MarkerKind kind) noexcept;
MarkerKind parse_marker_kind(std::string_view name);
std::string_view command_name(Command command) noexcept;
Command parse_command(std::string_view name);

struct MarkerSlot {
    int pair_index = 0;
    MarkerKind kind = MarkerKind::Pick;
    std::optional<Vec2> position;
    std::optional<std::int64_t> placed_at; // ms since session start
};

/// Milliseconds on any monotonic scale; only differences are recorded.
using Clock = std::function<std::int64_t()>;
Clock steady_clock_ms();

struct CommandOutcome {
    std::vector<LogEvent> events;
    std::vector<ClothState> frames;
};

/// One user's interaction state: marker slots, the simulated cloth, the
/// preview undo stack and the demonstration log. Not thread-safe; callers
/// serialize access per session.
class Session {
public:
    explicit Session(SessionConfig config, Clock clock = steady_clock_ms());

    /// Clamps `position` to the workspace. Throws SessionFinished, NoSuchSlot
    /// (slot not spawned yet, or Place before Pick) or PairLocked.
    LogEvent place_marker(int pair_index, MarkerKind kind, const Vec2& position);

    /// Throws CommandDisabled, SessionFinished, NothingToSimulate,
    /// NothingToUndo, MarkersIncomplete, or a fold-engine error; the session
    /// is unchanged whenever a command throws.
    CommandOutcome apply(Command command);

    /// Whether apply(command) would pass its precondition checks.
    bool available(Command command) const;

    const SessionConfig& config() const { return config_; }
    const std::vector<MarkerSlot>& slots() const { return slots_; }
    const ClothState& cloth() const { return cloth_; }
    int simulated_pairs() const { return simulated_pairs_; }
    bool executed() const { return executed_; }
    std::size_t undo_depth() const { return undo_stack_.size(); }

    /// Pairs 0..k-1 with both markers placed.
    int placed_pairs() const;
    /// Index of the highest visible pair.
    int active_pair() const { return static_cast<int>(slots_.size()) / 2 - 1; }
    /// Actions for the fully placed prefix of pairs.
    std::vector<FoldAction> actions() const;

    const DemonstrationLog& log() const { return log_; }
    DemonstrationLog export_log() const { return log_; }

private:
    const MarkerSlot& slot(int pair, MarkerKind kind) const;
    MarkerSlot& slot(int pair, MarkerKind kind);
    void spawn_pair();
    ClothState flat_cloth() const;
    LogEvent record(EventKind kind, nlohmann::ordered_json payload);

    CommandOutcome simulate();
    CommandOutcome fold();
    CommandOutcome undo();
    CommandOutcome reset();

    SessionConfig config_;
    Clock clock_;
    std::int64_t started_at_ = 0;
    std::vector<MarkerSlot> slots_;
    ClothState cloth_;
    struct UndoEntry {
        ClothState cloth;
        int simulated_pairs = 0;
    };
    std::vector<UndoEntry> undo_stack_;
    int simulated_pairs_ = 0;
    bool executed_ = false;
    DemonstrationLog log_;
};

} // namespace foldlab
