#include "foldlab/demo_log.hpp"

#include "foldlab/error.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

namespace foldlab {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kNames = {{
    {EventKind::SessionStart, "session_start"},
    {EventKind::MarkerPlaced, "marker_placed"},
    {EventKind::Simulate, "simulate"},
    {EventKind::Undo, "undo"},
    {EventKind::Reset, "reset"},
    {EventKind::FoldStart, "fold_start"},
    {EventKind::FoldComplete, "fold_complete"},
}};

} // namespace

std::string_view event_name(EventKind kind) noexcept
{
    for (const auto& [k, name] : kNames)
        if (k == kind)
            return name;
    return "unknown";
}

EventKind parse_event_name(std::string_view name)
{
    for (const auto& [k, n] : kNames)
        if (n == name)
            return k;
    throw Error(ErrorCode::SchemaError, "unknown event kind '" + std::string(name) + "'");
}

std::string to_line(const LogEvent& event)
{
    nlohmann::ordered_json j;
    j["t_ms"] = event.t_ms;
    j["event"] = event_name(event.kind);
    j["payload"] = event.payload;
    return j.dump();
}

LogEvent parse_line(std::string_view line)
{
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("log line is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("t_ms") || !j.contains("event") || !j["t_ms"].is_number_integer()
        || !j["event"].is_string())
        throw Error(ErrorCode::SchemaError, "log line lacks t_ms/event");
    LogEvent event;
    event.t_ms = j["t_ms"].get<std::int64_t>();
    event.kind = parse_event_name(j["event"].get<std::string>());
    if (j.contains("payload")) {
        if (!j["payload"].is_object())
            throw Error(ErrorCode::SchemaError, "payload must be an object");
        event.payload = j["payload"];
    }
    return event;
}

void write_log(std::ostream& out, const DemonstrationLog& log)
{
    for (const auto& event : log.events)
        out << to_line(event) << '\n';
}

DemonstrationLog read_log(std::istream& in)
{
    DemonstrationLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        log.events.push_back(parse_line(line));
    }
    return log;
}

DemonstrationLog read_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_log(in);
}

void check_schema(const DemonstrationLog& log)
{
    if (log.events.empty() || log.events.front().kind != EventKind::SessionStart)
        throw Error(ErrorCode::SchemaError, "log must begin with session_start");
    bool open_fold = false;
    std::int64_t last = log.events.front().t_ms;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        if (i > 0 && e.kind == EventKind::SessionStart)
            throw Error(ErrorCode::SchemaError, "more than one session_start");
        if (e.t_ms < last)
            throw Error(ErrorCode::SchemaError, "timestamps decrease");
        last = e.t_ms;
        if (e.kind == EventKind::FoldStart)
            open_fold = true;
        if (e.kind == EventKind::FoldComplete) {
            if (!open_fold)
                throw Error(ErrorCode::SchemaError, "fold_complete without fold_start");
            open_fold = false;
        }
    }
}

} // namespace foldlab
