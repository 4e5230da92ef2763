#include "foldlab/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace foldlab {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

constexpr std::string_view kPlaceholderIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>foldlab</title></head>
<body>
<h1>foldlab service</h1>
<p>No UI bundle is installed. Connect a WebSocket client to <code>/ws</code> and send JSON messages such as
<code>{"kind":"create_session","payload":{"goal_id":"G1"}}</code>.</p>
</body></html>
)";

std::string_view mime_type(const std::filesystem::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json" || ext == ".map") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    if (ext == ".ico") return "image/x-icon";
    if (ext == ".wasm") return "application/wasm";
    return "application/octet-stream";
}

} // namespace

std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string_view target)
{
    std::string path(target.substr(0, target.find_first_of("?#")));
    if (path.empty() || path.front() != '/')
        return std::nullopt;
    if (path.back() == '/')
        path += "index.html";
    std::filesystem::path relative;
    std::size_t start = 1;
    while (start <= path.size()) {
        const std::size_t end = std::min(path.find('/', start), path.size());
        const std::string segment = path.substr(start, end - start);
        if (segment == ".." || segment.find('\\') != std::string::npos || segment.find('\0') != std::string::npos)
            return std::nullopt;
        if (!segment.empty() && segment != ".")
            relative /= segment;
        start = end + 1;
    }
    return root / relative;
}

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
    explicit Impl(ServerOptions o)
        : options(std::move(o)), registry(SessionRegistry::Options{options.data_dir, 20, steady_clock_ms()}),
          acceptor(ioc)
    {
    }

    ServerOptions options;
    SessionRegistry registry;
    asio::io_context ioc;
    tcp::acceptor acceptor;
    std::thread accept_thread;
    std::atomic<bool> stopping{false};
    std::mutex mutex;
    std::condition_variable stopped_cv;
    bool stopped = false;

    void accept_loop()
    {
        for (;;) {
            tcp::socket socket(ioc);
            beast::error_code ec;
            acceptor.accept(socket, ec);
            if (stopping)
                break;
            if (ec)
                continue;
            std::thread([self = shared_from_this(), s = std::move(socket)]() mutable { self->serve(std::move(s)); })
                .detach();
        }
    }

    void serve(tcp::socket socket)
    {
        try {
            beast::flat_buffer buffer;
            for (;;) {
                http::request<http::string_body> req;
                http::read(socket, buffer, req);
                if (websocket::is_upgrade(req)) {
                    if (req.target() != "/ws") {
                        write_response(socket, req, http::status::not_found, "text/plain", "no such endpoint\n");
                        return;
                    }
                    run_websocket(std::move(socket), req);
                    return;
                }
                const bool keep_alive = handle_http(socket, req);
                if (!keep_alive)
                    break;
            }
            beast::error_code ec;
            socket.shutdown(tcp::socket::shutdown_send, ec);
        } catch (const std::exception&) {
            // Client went away or sent garbage; the connection is simply dropped.
        }
    }

    void run_websocket(tcp::socket socket, const http::request<http::string_body>& req)
    {
        websocket::stream<tcp::socket> ws(std::move(socket));
        ws.accept(req);
        beast::flat_buffer buffer;
        for (;;) {
            beast::error_code ec;
            ws.read(buffer, ec);
            if (ec)
                return;
            const std::string text = beast::buffers_to_string(buffer.data());
            buffer.consume(buffer.size());
            for (const auto& reply : registry.handle_message(text)) {
                const std::string out = reply.dump();
                ws.text(true);
                ws.write(asio::buffer(out));
            }
        }
    }

    template <class Request>
    void write_response(tcp::socket& socket, const Request& req, http::status status, std::string_view type,
                        std::string body)
    {
        http::response<http::string_body> res{status, req.version()};
        res.set(http::field::server, "foldlab");
        res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
        res.keep_alive(req.keep_alive());
        res.body() = req.method() == http::verb::head ? std::string() : std::move(body);
        res.prepare_payload();
        http::write(socket, res);
    }

    bool handle_http(tcp::socket& socket, const http::request<http::string_body>& req)
    {
        if (req.method() != http::verb::get && req.method() != http::verb::head) {
            write_response(socket, req, http::status::method_not_allowed, "text/plain", "method not allowed\n");
            return req.keep_alive();
        }
        const std::string_view target(req.target().data(), req.target().size());
        const bool use_static = options.static_dir && std::filesystem::is_directory(*options.static_dir);
        if (!use_static) {
            const std::string_view path = target.substr(0, target.find_first_of("?#"));
            if (path == "/" || path == "/index.html")
                write_response(socket, req, http::status::ok, "text/html; charset=utf-8", std::string(kPlaceholderIndex));
            else
                write_response(socket, req, http::status::not_found, "text/plain", "not found\n");
            return req.keep_alive();
        }

        const auto file = resolve_static(*options.static_dir, target);
        if (!file) {
            write_response(socket, req, http::status::bad_request, "text/plain", "bad path\n");
            return req.keep_alive();
        }
        std::ifstream in(*file, std::ios::binary);
        if (!in || std::filesystem::is_directory(*file)) {
            write_response(socket, req, http::status::not_found, "text/plain", "not found\n");
            return req.keep_alive();
        }
        std::ostringstream body;
        body << in.rdbuf();
        write_response(socket, req, http::status::ok, mime_type(*file), std::move(body).str());
        return req.keep_alive();
    }
};

Server::Server(ServerOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {}

Server::~Server()
{
    stop();
}

void Server::start()
{
    const tcp::endpoint endpoint(asio::ip::make_address(impl_->options.address), impl_->options.port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen(asio::socket_base::max_listen_connections);
    impl_->accept_thread = std::thread([impl = impl_] { impl->accept_loop(); });
}

unsigned short Server::port() const
{
    return impl_->acceptor.local_endpoint().port();
}

void Server::stop()
{
    if (!impl_->accept_thread.joinable())
        return;
    impl_->stopping = true;
    {
        // Wake the blocking accept() with a throwaway connection.
        beast::error_code ec;
        tcp::socket poke(impl_->ioc);
        const auto address = impl_->acceptor.local_endpoint().address();
        poke.connect({address.is_unspecified() ? asio::ip::make_address("127.0.0.1") : address, port()}, ec);
    }
    impl_->accept_thread.join();
    beast::error_code ec;
    impl_->acceptor.close(ec);
    {
        std::lock_guard lock(impl_->mutex);
        impl_->stopped = true;
    }
    impl_->stopped_cv.notify_all();
}

void Server::wait()
{
    std::unique_lock lock(impl_->mutex);
    impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

} // namespace foldlab
