#pragma once

#include "foldlab/config.hpp"
#include "foldlab/mask.hpp"
#include "foldlab/session.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace foldlab {

inline constexpr std::size_t kMaxFramesPerMessage = 60;

/// Evenly spaced subset of at most `limit` frames, always keeping the first
/// and the last.
std::vector<ClothState> downsample_frames(const std::vector<ClothState>& frames,
                                          std::size_t limit = kMaxFramesPerMessage);

// Wire encodings shared with UI clients.
nlohmann::ordered_json cloth_to_json(const ClothState& state);
/// Run-length encoding: alternating runs of 0 and 1 pixels in row-major
/// order, starting with a (possibly empty) run of 0.
nlohmann::ordered_json mask_to_json(const Mask& mask);
Mask mask_from_json(const nlohmann::ordered_json& j);

/// Registry of live sessions and the dispatcher for the JSON message
/// protocol. Messages for one session are handled strictly one at a time;
/// different sessions proceed in parallel.
class SessionRegistry {
public:
    struct Options {
        std::optional<std::filesystem::path> data_dir; // append-only <id>.jsonl logs
        int align_radius = 20;
        Clock clock = steady_clock_ms();
    };

    SessionRegistry();
    explicit SessionRegistry(Options options);

    /// Parses one client message and returns the server messages it produces
    /// (always at least one). Never throws for bad input.
    std::vector<nlohmann::ordered_json> handle_message(std::string_view text);
    std::vector<nlohmann::ordered_json> handle(const nlohmann::ordered_json& message);

    std::optional<DemonstrationLog> session_log(const std::string& id) const;
    std::size_t size() const;

private:
    struct Entry {
        explicit Entry(Session s) : session(std::move(s)) {}
        std::mutex mutex;
        Session session;
        std::int64_t seq = 0;
        std::size_t persisted_events = 0;
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    std::vector<nlohmann::ordered_json> create_session(const nlohmann::ordered_json& payload);
    std::vector<nlohmann::ordered_json> dispatch(const std::string& id, Entry& entry, const std::string& kind,
                                                 const nlohmann::ordered_json& payload);
    nlohmann::ordered_json snapshot(const Session& session) const;
    const Mask& goal_mask(const SessionConfig& config);
    void persist(const std::string& id, Entry& entry);

    Options options_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::atomic<std::uint64_t> next_id_{1};

    std::mutex goal_mutex_;
    std::map<std::string, Mask> goal_cache_;
};

} // namespace foldlab
