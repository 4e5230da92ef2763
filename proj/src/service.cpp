#include "foldlab/service.hpp"

#include "foldlab/error.hpp"
#include "foldlab/goals.hpp"
#include "foldlab/scoring.hpp"

#include <fstream>

namespace foldlab {
namespace {

using Json = nlohmann::ordered_json;

Json message(std::string_view kind, const std::string& session, std::int64_t seq, Json payload)
{
    Json j;
    j["kind"] = kind;
    j["session"] = session;
    j["seq"] = seq;
    j["payload"] = std::move(payload);
    return j;
}

Json error_payload(ErrorCode code, const std::string& what)
{
    Json p;
    p["code"] = code_name(code);
    p["message"] = what;
    return p;
}

const Json& require(const Json& payload, const char* key)
{
    if (!payload.is_object() || !payload.contains(key))
        throw Error(ErrorCode::BadRequest, std::string("payload lacks '") + key + "'");
    return payload[key];
}

} // namespace

std::vector<ClothState> downsample_frames(const std::vector<ClothState>& frames, std::size_t limit)
{
    if (frames.size() <= limit || limit < 2)
        return frames;
    std::vector<ClothState> out;
    out.reserve(limit);
    const std::size_t last = frames.size() - 1;
    for (std::size_t i = 0; i < limit; ++i)
        out.push_back(frames[(i * last + (limit - 1) / 2) / (limit - 1)]);
    return out;
}

Json cloth_to_json(const ClothState& state)
{
    Json j;
    j["resolution"] = state.topology ? state.topology->resolution : 0;
    j["sim_time"] = state.sim_time;
    Json positions = Json::array();
    for (const auto& p : state.positions) {
        positions.push_back(p.x());
        positions.push_back(p.y());
        positions.push_back(p.z());
    }
    j["positions"] = std::move(positions);
    return j;
}

Json mask_to_json(const Mask& mask)
{
    Json runs = Json::array();
    std::uint8_t current = 0;
    std::int64_t run = 0;
    for (auto bit : mask.bits()) {
        if (bit != current) {
            runs.push_back(run);
            run = 0;
            current = bit;
        }
        ++run;
    }
    runs.push_back(run);
    Json j;
    j["width"] = mask.width();
    j["height"] = mask.height();
    j["runs"] = std::move(runs);
    return j;
}

Mask mask_from_json(const Json& j)
{
    try {
        Mask mask(j.at("width").get<int>(), j.at("height").get<int>());
        const auto width = static_cast<std::int64_t>(mask.width());
        const auto total = width * mask.height();
        std::int64_t offset = 0;
        bool bit = false;
        for (const auto& r : j.at("runs")) {
            const auto n = r.get<std::int64_t>();
            if (n < 0 || offset + n > total)
                throw Error(ErrorCode::SchemaError, "mask runs overflow the frame");
            if (bit)
                for (std::int64_t k = offset; k < offset + n; ++k)
                    mask.set(static_cast<int>(k % width), static_cast<int>(k / width));
            offset += n;
            bit = !bit;
        }
        if (offset != total)
            throw Error(ErrorCode::SchemaError, "mask runs do not cover the frame");
        return mask;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed mask: ") + e.what());
    }
}

SessionRegistry::SessionRegistry() : SessionRegistry(Options{}) {}

SessionRegistry::SessionRegistry(Options options) : options_(std::move(options))
{
    if (options_.data_dir)
        std::filesystem::create_directories(*options_.data_dir);
}

std::size_t SessionRegistry::size() const
{
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionRegistry::Entry> SessionRegistry::find(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::optional<DemonstrationLog> SessionRegistry::session_log(const std::string& id) const
{
    const auto entry = find(id);
    if (!entry)
        return std::nullopt;
    std::lock_guard lock(entry->mutex);
    return entry->session.export_log();
}

std::vector<Json> SessionRegistry::handle_message(std::string_view text)
{
    Json parsed;
    try {
        parsed = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        return {message("error", "", 0, error_payload(ErrorCode::BadRequest, std::string("invalid JSON: ") + e.what()))};
    }
    return handle(parsed);
}

std::vector<Json> SessionRegistry::handle(const Json& msg)
{
    if (!msg.is_object() || !msg.contains("kind") || !msg["kind"].is_string())
        return {message("error", "", 0, error_payload(ErrorCode::BadRequest, "message needs a string 'kind'"))};
    const std::string kind = msg["kind"].get<std::string>();
    const Json payload = msg.contains("payload") ? msg["payload"] : Json::object();
    if (!payload.is_object())
        return {message("error", "", 0, error_payload(ErrorCode::BadRequest, "payload must be an object"))};

    if (kind == "create_session")
        return create_session(payload);

    if (kind == "list_goals") {
        Json goals = Json::array();
        for (const auto& g : builtin_goals()) {
            Json item;
            item["id"] = g.id;
            item["name"] = g.name;
            item["description"] = g.description;
            goals.push_back(std::move(item));
        }
        Json p;
        p["goals"] = std::move(goals);
        return {message("goal_list", "", 0, std::move(p))};
    }

    if (kind != "place_marker" && kind != "command" && kind != "get_state")
        return {message("error", "", 0, error_payload(ErrorCode::BadRequest, "unknown message kind '" + kind + "'"))};
    if (!msg.contains("session") || !msg["session"].is_string())
        return {message("error", "", 0, error_payload(ErrorCode::BadRequest, "message needs a string 'session'"))};

    const std::string id = msg["session"].get<std::string>();
    const auto entry = find(id);
    if (!entry)
        return {message("error", id, 0, error_payload(ErrorCode::UnknownSession, "no session '" + id + "'"))};

    std::lock_guard lock(entry->mutex);
    std::vector<Json> out;
    try {
        out = dispatch(id, *entry, kind, payload);
    } catch (const Error& e) {
        out = {message("error", id, ++entry->seq, error_payload(e.code(), e.what()))};
    } catch (const nlohmann::json::exception& e) {
        out = {message("error", id, ++entry->seq, error_payload(ErrorCode::BadRequest, e.what()))};
    }
    persist(id, *entry);
    return out;
}

std::vector<Json> SessionRegistry::create_session(const Json& payload)
{
    SessionConfig config;
    try {
        config = session_config_from_json(payload);
        config.validate();
    } catch (const Error& e) {
        const ErrorCode code = e.code() == ErrorCode::InvalidConfig ? ErrorCode::BadRequest : e.code();
        return {message("error", "", 0, error_payload(code, e.what()))};
    }

    const std::string id = "s" + std::to_string(next_id_++);
    auto entry = std::make_shared<Entry>(Session(config, options_.clock));
    {
        std::lock_guard lock(mutex_);
        sessions_.emplace(id, entry);
    }

    std::lock_guard lock(entry->mutex);
    Json created;
    created["config"] = to_json(config);
    created["goal_mask"] = mask_to_json(goal_mask(config));
    std::vector<Json> out;
    out.push_back(message("session_created", id, ++entry->seq, std::move(created)));
    out.push_back(message("state_snapshot", id, ++entry->seq, snapshot(entry->session)));
    persist(id, *entry);
    return out;
}

std::vector<Json> SessionRegistry::dispatch(const std::string& id, Entry& entry, const std::string& kind,
                                            const Json& payload)
{
    Session& session = entry.session;
    std::vector<Json> out;

    if (kind == "get_state") {
        out.push_back(message("state_snapshot", id, ++entry.seq, snapshot(session)));
        return out;
    }

    if (kind == "place_marker") {
        const Json& pair = require(payload, "pair");
        const Json& marker = require(payload, "kind");
        const Json& x = require(payload, "x");
        const Json& y = require(payload, "y");
        if (!pair.is_number_integer() || !marker.is_string() || !x.is_number() || !y.is_number())
            throw Error(ErrorCode::BadRequest, "place_marker needs integer pair, string kind, numeric x and y");
        session.place_marker(pair.get<int>(), parse_marker_kind(marker.get<std::string>()),
                             {x.get<double>(), y.get<double>()});
        out.push_back(message("state_snapshot", id, ++entry.seq, snapshot(session)));
        return out;
    }

    // kind == "command"
    const Json& name = require(payload, "command");
    if (!name.is_string())
        throw Error(ErrorCode::BadRequest, "command must be a string");
    const Command command = parse_command(name.get<std::string>());
    CommandOutcome outcome = session.apply(command);

    if (command == Command::Simulate) {
        Json frames = Json::array();
        for (const auto& f : downsample_frames(outcome.frames))
            frames.push_back(cloth_to_json(f));
        Json p;
        p["pair"] = session.simulated_pairs() - 1;
        p["frames"] = std::move(frames);
        out.push_back(message("preview_frames", id, ++entry.seq, std::move(p)));
    } else if (command == Command::Fold) {
        Json frames = Json::array();
        for (const auto& f : downsample_frames(outcome.frames))
            frames.push_back(cloth_to_json(f));
        const Mask result = rasterize_topdown(session.cloth(), session.config().grid);
        Json p;
        p["frames"] = std::move(frames);
        p["final"] = cloth_to_json(session.cloth());
        p["mask"] = mask_to_json(result);
        out.push_back(message("fold_result", id, ++entry.seq, std::move(p)));

        TrialScore score = score_trial(result, goal_mask(session.config()), options_.align_radius);
        score.completion_time = completion_time(session.log());
        Json s = to_json(score);
        s["goal_id"] = session.config().goal_id;
        out.push_back(message("score", id, ++entry.seq, std::move(s)));
    }
    out.push_back(message("state_snapshot", id, ++entry.seq, snapshot(session)));
    return out;
}

Json SessionRegistry::snapshot(const Session& session) const
{
    const auto& cfg = session.config();
    Json slots = Json::array();
    for (const auto& s : session.slots()) {
        Json j;
        j["pair"] = s.pair_index;
        j["kind"] = marker_name(s.kind);
        j["position"] = s.position ? Json::array({s.position->x(), s.position->y()}) : Json(nullptr);
        j["locked"] = s.pair_index < session.simulated_pairs();
        slots.push_back(std::move(j));
    }
    Json available;
    for (Command c : {Command::Simulate, Command::Fold, Command::Undo, Command::Reset})
        available[std::string(command_name(c))] = session.available(c);

    Json j;
    j["n_folds"] = cfg.n_folds;
    j["preview_enabled"] = cfg.preview_enabled;
    j["goal_id"] = cfg.goal_id;
    j["workspace"] = to_json(cfg.grid);
    j["active_pair"] = session.active_pair();
    j["simulated_pairs"] = session.simulated_pairs();
    j["executed"] = session.executed();
    j["undo_depth"] = session.undo_depth();
    j["slots"] = std::move(slots);
    j["available"] = std::move(available);
    j["cloth"] = cloth_to_json(session.cloth());
    return j;
}

const Mask& SessionRegistry::goal_mask(const SessionConfig& config)
{
    Json key = to_json(config);
    key.erase("n_folds");
    key.erase("preview_enabled");
    const std::string k = key.dump();
    std::lock_guard lock(goal_mutex_);
    auto it = goal_cache_.find(k);
    if (it == goal_cache_.end())
        it = goal_cache_.emplace(k, render_goal(find_goal(config.goal_id), config.cloth, config.fold, config.grid)).first;
    return it->second;
}

void SessionRegistry::persist(const std::string& id, Entry& entry)
{
    if (!options_.data_dir)
        return;
    const auto& events = entry.session.log().events;
    if (entry.persisted_events >= events.size())
        return;
    std::ofstream out(*options_.data_dir / (id + ".jsonl"), std::ios::app);
    for (std::size_t i = entry.persisted_events; i < events.size(); ++i)
        out << to_line(events[i]) << '\n';
    out.flush();
    entry.persisted_events = events.size();
}

} // namespace foldlab
