#pragma once

#include "foldlab/service.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace foldlab {

struct ServerOptions {
    std::string address = "0.0.0.0";
    unsigned short port = 8080;                      // 0 picks a free port
    std::optional<std::filesystem::path> data_dir;   // per-session .jsonl logs
    std::optional<std::filesystem::path> static_dir; // UI assets; placeholder page if absent
};

/// WebSocket endpoint at /ws speaking the JSON message protocol, plus plain
/// HTTP GET for static assets on the same port. One thread per connection.
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting in a background thread.
    void start();
    /// Stops accepting; already open connections finish on their own.
    void stop();
    /// Blocks until stop() is called from another thread (or forever).
    void wait();
    unsigned short port() const;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

/// Resolves a request target to a file under `root`, rejecting anything that
/// escapes it. Returns nullopt for traversal attempts.
std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string_view target);

} // namespace foldlab
