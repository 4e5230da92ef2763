#include "foldlab/server.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace foldlab;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
using tcp = asio::ip::tcp;
using Json = nlohmann::ordered_json;

namespace {

http::response<http::string_body> http_get(unsigned short port, const std::string& target)
{
    asio::io_context ioc;
    tcp::socket socket(ioc);
    socket.connect({asio::ip::make_address("127.0.0.1"), port});
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "localhost");
    http::write(socket, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(socket, buffer, res);
    return res;
}

struct StaticDir {
    std::filesystem::path root = std::filesystem::temp_directory_path() / "foldlab_server_static";
    StaticDir()
    {
        std::filesystem::remove_all(root);
        std::filesystem::create_directories(root / "assets");
        std::ofstream(root / "index.html") << "<html>foldlab</html>";
        std::ofstream(root / "assets" / "app.js") << "console.log(1);";
    }
    ~StaticDir() { std::filesystem::remove_all(root); }
};

} // namespace

TEST_SUITE("server")
{
    TEST_CASE("resolve_static stays inside the root")
    {
        const std::filesystem::path root = "/srv/ui";
        CHECK(resolve_static(root, "/") == root / "index.html");
        CHECK(resolve_static(root, "/assets/app.js?v=3") == root / "assets" / "app.js");
        CHECK(resolve_static(root, "/./a//b") == root / "a" / "b");
        CHECK_FALSE(resolve_static(root, "/../etc/passwd"));
        CHECK_FALSE(resolve_static(root, "/assets/../../x"));
        CHECK_FALSE(resolve_static(root, "/a\\b"));
        CHECK_FALSE(resolve_static(root, "relative"));
        CHECK_FALSE(resolve_static(root, std::string_view("/a\0b", 4)));
    }

    TEST_CASE("HTTP and WebSocket on the same port")
    {
        StaticDir dir;
        ServerOptions options;
        options.address = "127.0.0.1";
        options.port = 0;
        options.static_dir = dir.root;
        Server server(options);
        server.start();
        const unsigned short port = server.port();
        REQUIRE(port != 0);

        SUBCASE("static files")
        {
            auto res = http_get(port, "/");
            CHECK(res.result() == http::status::ok);
            CHECK(res.body() == "<html>foldlab</html>");
            CHECK(std::string(res[http::field::content_type]).find("text/html") == 0);
            res = http_get(port, "/assets/app.js");
            CHECK(res.result() == http::status::ok);
            CHECK(res.body() == "console.log(1);");
            CHECK(http_get(port, "/missing.css").result() == http::status::not_found);
            CHECK(http_get(port, "/../secret").result() == http::status::bad_request);
        }

        SUBCASE("websocket protocol round-trip")
        {
            asio::io_context ioc;
            beast::websocket::stream<tcp::socket> ws(ioc);
            ws.next_layer().connect({asio::ip::make_address("127.0.0.1"), port});
            ws.handshake("localhost", "/ws");
            ws.text(true);

            const auto receive = [&] {
                beast::flat_buffer buffer;
                ws.read(buffer);
                return Json::parse(beast::buffers_to_string(buffer.data()));
            };
            ws.write(asio::buffer(std::string(R"({"kind":"create_session","payload":{"goal_id":"G1"}})")));
            const Json created = receive();
            CHECK(created["kind"] == "session_created");
            const Json snapshot = receive();
            CHECK(snapshot["kind"] == "state_snapshot");
            CHECK(snapshot["seq"] == 2);

            ws.write(asio::buffer(std::string("garbage")));
            const Json err = receive();
            CHECK(err["kind"] == "error");
            CHECK(err["payload"]["code"] == "bad_request");

            // The connection survives a bad message.
            Json get;
            get["kind"] = "get_state";
            get["session"] = created["session"];
            ws.write(asio::buffer(get.dump()));
            const Json again = receive();
            CHECK(again["kind"] == "state_snapshot");
            CHECK(again["seq"] == 3);
            ws.close(beast::websocket::close_code::normal);
        }

        server.stop();
    }
}
