// foldlab: interactive fold-session service and batch tools.

#include "foldlab/analysis.hpp"
#include "foldlab/config.hpp"
#include "foldlab/error.hpp"
#include "foldlab/goals.hpp"
#include "foldlab/netpbm.hpp"
#include "foldlab/replay.hpp"
#include "foldlab/scoring.hpp"
#include "foldlab/server.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace foldlab;
using Json = nlohmann::ordered_json;

constexpr int kExitError = 1;
constexpr int kExitValidation = 2;

SessionConfig load_config(const std::string& path)
{
    if (path.empty())
        return SessionConfig{};
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    SessionConfig config = session_config_from_json(j);
    config.validate();
    return config;
}

HsvRange parse_hsv(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(field, &used));
            if (used != field.size())
                throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "--hsv expects six numbers, got '" + text + "'");
        }
    }
    if (v.size() != 6)
        throw Error(ErrorCode::InvalidConfig, "--hsv expects h0,h1,s0,s1,v0,v1");
    HsvRange range{v[0], v[1], v[2], v[3], v[4], v[5]};
    range.validate();
    return range;
}

Mask load_mask(const std::string& path, const std::optional<HsvRange>& hsv)
{
    const std::string magic = netpbm_magic(path);
    if (magic == "P5")
        return read_pgm(std::filesystem::path(path));
    if (magic == "P6") {
        if (!hsv)
            throw Error(ErrorCode::InvalidConfig, path + " is an RGB image; pass --hsv to segment it");
        return segment_hsv(read_ppm(std::filesystem::path(path)), *hsv);
    }
    throw Error(ErrorCode::SchemaError, path + " is neither a P5 graymap nor a P6 pixmap");
}

std::sig_atomic_t volatile g_interrupted = 0;

int cmd_serve(unsigned short port, const std::string& address, const std::string& data_dir,
              const std::string& static_dir)
{
    ServerOptions options;
    options.address = address;
    options.port = port;
    if (!data_dir.empty())
        options.data_dir = data_dir;
    if (!static_dir.empty())
        options.static_dir = static_dir;
    else if (std::filesystem::is_directory("webui/dist"))
        options.static_dir = "webui/dist";

    Server server(options);
    server.start();
    std::cerr << "foldlab listening on " << address << ":" << server.port() << " (WebSocket at /ws";
    if (options.static_dir)
        std::cerr << ", static files from " << options.static_dir->string();
    if (options.data_dir)
        std::cerr << ", logs in " << options.data_dir->string();
    std::cerr << ")\n";

    std::signal(SIGINT, [](int) { g_interrupted = 1; });
    std::signal(SIGTERM, [](int) { g_interrupted = 1; });
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    return 0;
}

int cmd_replay(const std::string& log_path, const std::string& out, const std::string& config_path,
               const std::string& log_out)
{
    std::optional<SessionConfig> config;
    if (!config_path.empty())
        config = load_config(config_path);
    const ReplayResult result = replay(read_log(std::filesystem::path(log_path)), config);
    if (!out.empty())
        write_pgm(std::filesystem::path(out), result.mask);
    if (!log_out.empty()) {
        std::ofstream f(log_out);
        if (!f)
            throw Error(ErrorCode::IoError, "cannot write " + log_out);
        write_log(f, result.log);
    }
    std::cout << to_json(result.score).dump() << '\n';
    return 0;
}

int cmd_score(const std::string& result_path, const std::string& goal, const std::string& hsv_text, int radius,
              const std::string& config_path)
{
    if (radius < 0)
        throw Error(ErrorCode::InvalidConfig, "--align must be non-negative");
    std::optional<HsvRange> hsv;
    if (!hsv_text.empty())
        hsv = parse_hsv(hsv_text);
    const Mask result = load_mask(result_path, hsv);

    Mask goal_mask = [&] {
        if (std::filesystem::exists(goal))
            return load_mask(goal, hsv);
        const SessionConfig config = load_config(config_path);
        return render_goal(find_goal(goal), config.cloth, config.fold, config.grid);
    }();
    const TrialScore score = score_trial(result, goal_mask, radius);
    std::cout << to_json(score).dump() << '\n';
    return 0;
}

int cmd_goals_render(const std::string& out_dir, const std::string& config_path)
{
    const SessionConfig config = load_config(config_path);
    std::filesystem::create_directories(out_dir);
    Json manifest;
    manifest["config"] = to_json(config);
    Json goals = Json::array();
    for (const auto& goal : builtin_goals()) {
        const Mask mask = render_goal(goal, config.cloth, config.fold, config.grid);
        const std::string file = goal.id + ".pgm";
        write_pgm(std::filesystem::path(out_dir) / file, mask);

        Json item;
        item["id"] = goal.id;
        item["name"] = goal.name;
        item["description"] = goal.description;
        item["file"] = file;
        item["width"] = mask.width();
        item["height"] = mask.height();
        item["area_px"] = mask.area();
        Json script = Json::array();
        for (const auto& a : workspace_script(goal, config.cloth, config.grid))
            script.push_back({{"pick", {a.pick.x(), a.pick.y()}}, {"place", {a.place.x(), a.place.y()}}});
        item["script"] = std::move(script);
        goals.push_back(std::move(item));
        std::cerr << "rendered " << goal.id << " -> " << file << '\n';
    }
    manifest["goals"] = std::move(goals);
    std::ofstream f(std::filesystem::path(out_dir) / "manifest.json");
    if (!f)
        throw Error(ErrorCode::IoError, "cannot write manifest in " + out_dir);
    f << manifest.dump(2) << '\n';
    return 0;
}

int cmd_analyze(const std::string& csv)
{
    std::ifstream in(csv);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + csv);
    std::cout << analysis_report(read_trials_csv(in));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"foldlab: cloth-folding demonstration sessions, scoring and study analysis"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Run the WebSocket session service");
    int port = 8080;
    std::string address = "0.0.0.0", data_dir, static_dir;
    serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--address", address, "Listen address");
    serve->add_option("--data-dir", data_dir, "Directory for per-session demonstration logs");
    serve->add_option("--static-dir", static_dir, "UI assets to serve (default webui/dist if present)");

    auto* replay_cmd = app.add_subcommand("replay", "Re-drive a demonstration log and score the outcome");
    std::string log_path, out, config_path, log_out;
    replay_cmd->add_option("log", log_path, "Demonstration log (.jsonl)")->required();
    replay_cmd->add_option("--out", out, "Write the final mask as a P5 graymap");
    replay_cmd->add_option("--config", config_path, "Override the logged session config (JSON)");
    replay_cmd->add_option("--log-out", log_out, "Write the re-driven session's log");

    auto* score = app.add_subcommand("score", "Score a result mask against a goal");
    std::string result_path, goal, hsv;
    int radius = kDefaultAlignRadius;
    score->add_option("--result", result_path, "Result mask (P5) or image (P6)")->required();
    score->add_option("--goal", goal, "Goal id (G1..G4) or goal mask/image file")->required();
    score->add_option("--hsv", hsv, "Segmentation range h0,h1,s0,s1,v0,v1 for P6 inputs");
    score->add_option("--align", radius, "Alignment search radius in pixels");
    score->add_option("--config", config_path, "Session config (JSON) used to render goal ids");

    auto* goals = app.add_subcommand("goals", "Built-in goal configurations");
    goals->require_subcommand(1);
    auto* render = goals->add_subcommand("render", "Render goal masks and a manifest");
    std::string out_dir;
    render->add_option("--out", out_dir, "Output directory")->required();
    render->add_option("--config", config_path, "Session config (JSON)");

    auto* analyze = app.add_subcommand("analyze", "Means/σ and repeated-measures ANOVA for study data");
    std::string csv;
    analyze->add_option("csv", csv, "CSV with header subject,interface,preview,measure,value")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*serve)
            return cmd_serve(static_cast<unsigned short>(port), address, data_dir, static_dir);
        if (*replay_cmd)
            return cmd_replay(log_path, out, config_path, log_out);
        if (*score)
            return cmd_score(result_path, goal, hsv, radius, config_path);
        if (*render)
            return cmd_goals_render(out_dir, config_path);
        if (*analyze)
            return cmd_analyze(csv);
    } catch (const Error& e) {
        std::cerr << "error [" << code_name(e.code()) << "]: " << e.what() << '\n';
        return e.code() == ErrorCode::IoError ? kExitError : kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
