#include "foldlab/session.hpp"

#include "foldlab/error.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace foldlab {

std::string_view marker_name(MarkerKind kind) noexcept
{
    return kind == MarkerKind::Pick ? "pick" : "place";
}

MarkerKind parse_marker_kind(std::string_view name)
{
    if (name == "pick")
        return MarkerKind::Pick;
    if (name == "place")
        return MarkerKind::Place;
    throw Error(ErrorCode::BadRequest, "unknown marker kind '" + std::string(name) + "'");
}

std::string_view command_name(Command command) noexcept
{
    switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Fold: return "fold";
    case Command::Undo: return "undo";
    case Command::Reset: return "reset";
    }
    return "unknown";
}

Command parse_command(std::string_view name)
{
    for (Command c : {Command::Simulate, Command::Fold, Command::Undo, Command::Reset})
        if (command_name(c) == name)
            return c;
    throw Error(ErrorCode::BadRequest, "unknown command '" + std::string(name) + "'");
}

Clock steady_clock_ms()
{
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
}

Session::Session(SessionConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock))
{
    config_.validate();
    started_at_ = clock_();
    cloth_ = flat_cloth();
    spawn_pair();
    log_.events.push_back({0, EventKind::SessionStart, to_json(config_)});
}

ClothState Session::flat_cloth() const
{
    return create_cloth(config_.cloth, config_.grid.center());
}

void Session::spawn_pair()
{
    const int pair = static_cast<int>(slots_.size()) / 2;
    slots_.push_back({pair, MarkerKind::Pick, std::nullopt, std::nullopt});
    slots_.push_back({pair, MarkerKind::Place, std::nullopt, std::nullopt});
}

const MarkerSlot& Session::slot(int pair, MarkerKind kind) const
{
    return slots_[static_cast<std::size_t>(2 * pair + (kind == MarkerKind::Place ? 1 : 0))];
}

MarkerSlot& Session::slot(int pair, MarkerKind kind)
{
    return slots_[static_cast<std::size_t>(2 * pair + (kind == MarkerKind::Place ? 1 : 0))];
}

int Session::placed_pairs() const
{
    int k = 0;
    while (2 * k + 1 < static_cast<int>(slots_.size()) && slot(k, MarkerKind::Pick).position
           && slot(k, MarkerKind::Place).position)
        ++k;
    return k;
}

std::vector<FoldAction> Session::actions() const
{
    std::vector<FoldAction> out;
    for (int k = 0; k < placed_pairs(); ++k)
        out.push_back({*slot(k, MarkerKind::Pick).position, *slot(k, MarkerKind::Place).position});
    return out;
}

LogEvent Session::record(EventKind kind, nlohmann::ordered_json payload)
{
    std::int64_t t = clock_() - started_at_;
    if (!log_.events.empty())
        t = std::max(t, log_.events.back().t_ms);
    log_.events.push_back({t, kind, std::move(payload)});
    return log_.events.back();
}

LogEvent Session::place_marker(int pair_index, MarkerKind kind, const Vec2& position)
{
    if (executed_)
        throw Error(ErrorCode::SessionFinished, "the fold has been executed; reset to start over");
    if (pair_index < 0 || pair_index > active_pair())
        throw Error(ErrorCode::NoSuchSlot, "pair " + std::to_string(pair_index) + " has no visible markers");
    if (pair_index < simulated_pairs_)
        throw Error(ErrorCode::PairLocked, "pair " + std::to_string(pair_index) + " was simulated; undo first");
    if (kind == MarkerKind::Place && !slot(pair_index, MarkerKind::Pick).position)
        throw Error(ErrorCode::NoSuchSlot, "place the Pick marker of this pair first");

    const Vec2 clamped = config_.grid.clamp(position);
    nlohmann::ordered_json payload;
    payload["pair"] = pair_index;
    payload["kind"] = marker_name(kind);
    payload["x"] = clamped.x();
    payload["y"] = clamped.y();
    LogEvent event = record(EventKind::MarkerPlaced, std::move(payload));

    MarkerSlot& s = slot(pair_index, kind);
    s.position = clamped;
    s.placed_at = event.t_ms;

    if (placed_pairs() == active_pair() + 1 && active_pair() + 1 < config_.n_folds)
        spawn_pair();
    return event;
}

bool Session::available(Command command) const
{
    switch (command) {
    case Command::Simulate:
        return config_.preview_enabled && !executed_ && simulated_pairs_ < config_.n_folds
               && simulated_pairs_ < placed_pairs();
    case Command::Undo:
        return config_.preview_enabled && !executed_ && !undo_stack_.empty();
    case Command::Fold:
        return !executed_ && placed_pairs() == config_.n_folds;
    case Command::Reset:
        return true;
    }
    return false;
}

CommandOutcome Session::apply(Command command)
{
    switch (command) {
    case Command::Simulate: return simulate();
    case Command::Fold: return fold();
    case Command::Undo: return undo();
    case Command::Reset: return reset();
    }
    throw Error(ErrorCode::BadRequest, "unknown command");
}

CommandOutcome Session::simulate()
{
    if (!config_.preview_enabled)
        throw Error(ErrorCode::CommandDisabled, "simulate is disabled when previews are off");
    if (executed_)
        throw Error(ErrorCode::SessionFinished, "the fold has been executed; reset to start over");
    const int pair = simulated_pairs_;
    if (pair >= config_.n_folds || pair >= placed_pairs())
        throw Error(ErrorCode::NothingToSimulate, "no fully placed pair is waiting for a preview");

    const FoldAction action{*slot(pair, MarkerKind::Pick).position, *slot(pair, MarkerKind::Place).position};
    FoldResult result = execute_fold(cloth_, config_.cloth, action, config_.fold, config_.grid);

    undo_stack_.push_back({std::move(cloth_), simulated_pairs_});
    cloth_ = std::move(result.final_state);
    ++simulated_pairs_;

    nlohmann::ordered_json payload;
    payload["pair"] = pair;
    CommandOutcome out;
    out.events.push_back(record(EventKind::Simulate, std::move(payload)));
    out.frames = std::move(result.frames);
    return out;
}

CommandOutcome Session::undo()
{
    if (!config_.preview_enabled)
        throw Error(ErrorCode::CommandDisabled, "undo is disabled when previews are off");
    if (executed_)
        throw Error(ErrorCode::SessionFinished, "the fold has been executed; reset to start over");
    if (undo_stack_.empty())
        throw Error(ErrorCode::NothingToUndo, "no simulated fold to undo");

    UndoEntry entry = std::move(undo_stack_.back());
    undo_stack_.pop_back();
    cloth_ = std::move(entry.cloth);
    simulated_pairs_ = entry.simulated_pairs;

    nlohmann::ordered_json payload;
    payload["pair"] = simulated_pairs_;
    CommandOutcome out;
    out.events.push_back(record(EventKind::Undo, std::move(payload)));
    return out;
}

CommandOutcome Session::fold()
{
    if (executed_)
        throw Error(ErrorCode::SessionFinished, "the fold has already been executed");
    if (placed_pairs() < config_.n_folds)
        throw Error(ErrorCode::MarkersIncomplete, "place all Pick and Place markers before folding");

    // The committed result depends only on the marker list: start from flat.
    nlohmann::ordered_json start_payload;
    start_payload["pairs"] = config_.n_folds;
    const std::int64_t started = clock_();

    CommandOutcome out;
    ClothState state = flat_cloth();
    for (const auto& action : actions()) {
        FoldResult result = execute_fold(state, config_.cloth, action, config_.fold, config_.grid);
        state = std::move(result.final_state);
        for (auto& frame : result.frames)
            if (out.frames.empty() || frame.sim_time > out.frames.back().sim_time)
                out.frames.push_back(std::move(frame));
    }

    const std::int64_t finished = clock_();
    auto stamped = [&](EventKind kind, nlohmann::ordered_json payload, std::int64_t at) {
        std::int64_t t = std::max(at - started_at_, log_.events.back().t_ms);
        log_.events.push_back({t, kind, std::move(payload)});
        return log_.events.back();
    };
    out.events.push_back(stamped(EventKind::FoldStart, std::move(start_payload), started));
    nlohmann::ordered_json done_payload;
    done_payload["sim_time"] = state.sim_time;
    out.events.push_back(stamped(EventKind::FoldComplete, std::move(done_payload), finished));

    cloth_ = std::move(state);
    undo_stack_.clear();
    executed_ = true;
    return out;
}

CommandOutcome Session::reset()
{
    slots_.clear();
    spawn_pair();
    cloth_ = flat_cloth();
    undo_stack_.clear();
    simulated_pairs_ = 0;
    executed_ = false;

    CommandOutcome out;
    out.events.push_back(record(EventKind::Reset, nlohmann::ordered_json::object()));
    return out;
}

} // namespace foldlab
