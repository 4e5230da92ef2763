#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace foldlab {

enum class EventKind {
    SessionStart,
    MarkerPlaced,
    Simulate,
    Undo,
    Reset,
    FoldStart,
    FoldComplete,
};

std::string_view event_name(EventKind kind) noexcept;
EventKind parse_event_name(std::string_view name);

struct LogEvent {
    std::int64_t t_ms = 0;  // since session start
    EventKind kind = EventKind::SessionStart;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    bool operator==(const LogEvent&) const = default;
};

/// Timestamped record of one session. One JSON object per line, keys in the
/// fixed order t_ms, event, payload.
struct DemonstrationLog {
    std::vector<LogEvent> events;

    bool operator==(const DemonstrationLog&) const = default;
};

std::string to_line(const LogEvent& event);
LogEvent parse_line(std::string_view line);

void write_log(std::ostream& out, const DemonstrationLog& log);
DemonstrationLog read_log(std::istream& in);
DemonstrationLog read_log(const std::filesystem::path& path);

/// Throws SchemaError unless timestamps are non-decreasing, the log starts
/// with exactly one session_start, and every fold_complete follows a fold_start.
void check_schema(const DemonstrationLog& log);

} // namespace foldlab
