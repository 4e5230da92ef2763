#include "foldlab/replay.hpp"

#include "foldlab/error.hpp"
#include "foldlab/goals.hpp"

#include <deque>
#include <memory>

namespace foldlab {
namespace {

// Hands the session the logged timestamps instead of wall-clock time.
struct ScriptedClock {
    std::deque<std::int64_t> pending;
    std::int64_t last = 0;

    std::int64_t next()
    {
        if (!pending.empty()) {
            last = pending.front();
            pending.pop_front();
        }
        return last;
    }
};

Vec2 marker_position(const nlohmann::ordered_json& p)
{
    if (!p.contains("x") || !p.contains("y") || !p["x"].is_number() || !p["y"].is_number())
        throw Error(ErrorCode::SchemaError, "marker_placed needs numeric x and y");
    return {p["x"].get<double>(), p["y"].get<double>()};
}

} // namespace

ReplayResult replay(const DemonstrationLog& log, const std::optional<SessionConfig>& config)
{
    check_schema(log);
    const auto& events = log.events;

    SessionConfig cfg;
    if (config) {
        cfg = *config;
    } else {
        try {
            cfg = session_config_from_json(events.front().payload);
            cfg.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, std::string("session_start payload: ") + e.what());
        }
    }

    auto clock = std::make_shared<ScriptedClock>();
    clock->pending.push_back(events.front().t_ms);
    Session session(cfg, [clock] { return clock->next(); });

    for (std::size_t i = 1; i < events.size(); ++i) {
        const LogEvent& e = events[i];
        clock->pending.push_back(e.t_ms);
        try {
            switch (e.kind) {
            case EventKind::MarkerPlaced: {
                const auto& p = e.payload;
                if (!p.contains("pair") || !p["pair"].is_number_integer() || !p.contains("kind")
                    || !p["kind"].is_string())
                    throw Error(ErrorCode::SchemaError, "marker_placed needs pair and kind");
                MarkerKind kind;
                try {
                    kind = parse_marker_kind(p["kind"].get<std::string>());
                } catch (const Error&) {
                    throw Error(ErrorCode::SchemaError, "marker_placed has an unknown kind");
                }
                session.place_marker(p["pair"].get<int>(), kind, marker_position(p));
                break;
            }
            case EventKind::Simulate:
                session.apply(Command::Simulate);
                break;
            case EventKind::Undo:
                session.apply(Command::Undo);
                break;
            case EventKind::Reset:
                session.apply(Command::Reset);
                break;
            case EventKind::FoldStart:
                if (i + 1 >= events.size() || events[i + 1].kind != EventKind::FoldComplete)
                    throw Error(ErrorCode::DivergentLog, "fold_start is not followed by fold_complete");
                clock->pending.push_back(events[i + 1].t_ms);
                session.apply(Command::Fold);
                ++i;
                break;
            case EventKind::FoldComplete:
            case EventKind::SessionStart:
                throw Error(ErrorCode::DivergentLog, "unexpected " + std::string(event_name(e.kind)));
            }
        } catch (const Error& err) {
            if (err.code() == ErrorCode::SchemaError || err.code() == ErrorCode::DivergentLog)
                throw;
            throw Error(ErrorCode::DivergentLog,
                        "event " + std::to_string(i) + " (" + std::string(event_name(e.kind)) + ") cannot be replayed: "
                            + err.what());
        }
        clock->pending.clear();
    }

    ReplayResult result;
    result.final_state = session.cloth();
    result.mask = rasterize_topdown(result.final_state, cfg.grid);
    const Mask goal = render_goal(find_goal(cfg.goal_id), cfg.cloth, cfg.fold, cfg.grid);
    result.score = score_trial(result.mask, goal);
    try {
        result.score.completion_time = completion_time(log);
    } catch (const Error&) {
        // No fold was executed; completion time stays empty.
    }
    result.log = session.export_log();
    return result;
}

} // namespace foldlab
