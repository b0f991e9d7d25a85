// Command-line entry points: scene generation, one-off planning, replay,
// benchmarks, the session server and operator recording.
//
// Exit codes: 0 success, 1 planner failure, 2 usage or input error.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rtc/benchmark.hpp"
#include "rtc/dynamics.hpp"
#include "rtc/errors.hpp"
#include "rtc/formats.hpp"
#include "rtc/service.hpp"

namespace {

using namespace rtc;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kPlannerFailure = 1;
constexpr int kUsage = 2;

/// Input the user got wrong (bad mode name, unreadable file); exit 2.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

SessionMode modeArg(const std::string& arg)
{
    const std::string a = lower(arg);
    if (a == "rrt")
        return SessionMode::BareRRT;
    if (a == "kpiece")
        return SessionMode::BareKPIECE;
    for (auto m : {SessionMode::HITL, SessionMode::Heuristic, SessionMode::NAMO, SessionMode::Scripted,
                   SessionMode::BareRRT, SessionMode::BareKPIECE})
        if (lower(sessionModeName(m)) == a)
            return m;
    throw UsageError("unknown mode '" + arg + "' (heuristic, namo, scripted, rrt, kpiece)");
}

std::atomic<bool> g_stop{false};
extern "C" void onSignal(int) { g_stop.store(true); }

// ------------------------------------------------------------- gen-scenes

struct GenArgs
{
    std::uint64_t seed = 1;
    std::uint64_t count = 1;
    int objects = 10;
    std::string out_dir = ".";
};

int genScenes(const GenArgs& a)
{
    std::filesystem::create_directories(a.out_dir);
    for (std::uint64_t k = 0; k < a.count; ++k) {
        const std::uint64_t seed = a.seed + k;
        const std::string path = (std::filesystem::path(a.out_dir) / ("seed" + std::to_string(seed) + ".json")).string();
        saveSceneFile(generateRandomScene(seed, a.objects), path);
        std::cout << path << "\n";
    }
    return kOk;
}

// ------------------------------------------------------------------- plan

struct PlanArgs
{
    std::string scene;
    std::string mode = "heuristic";
    std::uint64_t seed = 1;
    double t_overall = 300.0;
    double t_pushing = 10.0;
    std::uint64_t iterations = 0;
    std::uint64_t pushing_iterations = 0;
    std::size_t max_actions = 1000;
    std::string script;
    std::string out;
};

int plan(const PlanArgs& a)
{
    const Scene scene = loadSceneFile(a.scene);
    const SessionMode mode = modeArg(a.mode);
    if (mode == SessionMode::HITL)
        throw UsageError("HITL needs an operator: use 'record' or 'serve'");
    Budgets b;
    b.t_overall = a.t_overall;
    b.t_pushing = a.t_pushing;
    b.overall_iterations = a.iterations;
    b.pushing_iterations = a.pushing_iterations;
    b.max_actions = a.max_actions;
    try {
        validateBudgets(b);
    } catch (const ContractError& e) {
        throw UsageError(e.what());
    }
    std::optional<OperatorScript> script;
    if (!a.script.empty()) {
        script = parseScript(readTextFile(a.script));
        validateScript(*script, scene);
    }
    if (mode == SessionMode::Scripted && !script)
        throw UsageError("scripted mode needs --script");

    auto strategy = makeStrategy(mode, a.seed, b, script);
    const GrtcOutcome out = runGRTC(scene, *strategy, b, plannerFor(mode, a.seed));
    const std::string scene_id = std::filesystem::path(a.scene).stem().string();
    const BenchmarkRecord rec = makeRecord(scene_id, mode, a.seed, out);

    json report{{"record", recordToJson(rec)}, {"actions", json::array()}};
    for (std::size_t i = 0; i < out.executed_actions.size(); ++i)
        report["actions"].push_back(json::parse(eventLogLine(i, out.executed_actions[i])));
    if (rec.success) {
        writeTextFile(a.out, serializeControls(out.full_controls));
        report["controls_file"] = a.out;
    } else {
        report["failure"] = rec.status;
    }
    std::cout << report.dump(2) << "\n";
    return rec.success ? kOk : kPlannerFailure;
}

// ----------------------------------------------------------------- replay

int replay(const std::string& scene_path, const std::string& controls_path)
{
    const Scene scene = loadSceneFile(scene_path);
    const std::vector<Control> controls = parseControls(readTextFile(controls_path));
    for (std::size_t i = 0; i < controls.size(); ++i) {
        try {
            checkControlLimits(controls[i], scene.physics());
        } catch (const ContractError& e) {
            throw UsageError("control " + std::to_string(i) + ": " + e.what());
        }
    }
    const Rollout r = rolloutControls(scene.initialConfiguration(), controls, scene);
    const bool reached = r.report.valid && goalObjectInPocket(r.trajectory.back(), scene);
    json report{{"controls", controls.size()}, {"valid", r.report.valid}, {"goal_reached", reached}};
    json violations = json::array();
    for (const auto& v : r.report.violations)
        violations.push_back({{"kind", violationName(v.kind)}, {"body", v.body}});
    report["violations"] = violations;
    report["applied"] = r.trajectory.size() - 1;
    std::cout << report.dump(2) << "\n";
    return reached ? kOk : kPlannerFailure;
}

// -------------------------------------------------------------- benchmark

int benchmark(const std::string& config_path, const std::string& out_path, unsigned workers)
{
    BenchmarkConfig cfg = parseBenchmarkConfig(readTextFile(config_path),
                                               std::filesystem::path(config_path).parent_path().string());
    if (workers > 0)
        cfg.workers = workers;
    const std::size_t total = cfg.scenes.size() * cfg.modes.size() * cfg.seeds.size();
    std::size_t done = 0;
    const auto records = runBenchmark(cfg, [&](const BenchmarkRecord& r) {
        std::cerr << "[" << ++done << "/" << total << "] " << r.scene_id << " " << sessionModeName(r.mode)
                  << " seed " << r.seed << ": " << r.status << "\n";
    });
    std::ostringstream lines;
    for (const auto& r : records)
        lines << recordToJson(r).dump() << "\n";
    writeTextFile(out_path, lines.str());
    std::cout << summaryTable(summarize(records));
    return kOk;
}

// ------------------------------------------------------------------ serve

int serve(const std::string& bind, int max_sessions)
{
    service::ServerConfig cfg;
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos)
        throw UsageError("--bind expects host:port");
    cfg.address = bind.substr(0, colon);
    try {
        cfg.port = static_cast<unsigned short>(std::stoul(bind.substr(colon + 1)));
    } catch (const std::exception&) {
        throw UsageError("bad port in --bind '" + bind + "'");
    }
    cfg.max_sessions = max_sessions;
    service::Server server(cfg);
    const unsigned short port = server.start();
    std::cerr << "serving protocol v" << proto::kVersion << " on ws://" << cfg.address << ":" << port << "/ (max "
              << max_sessions << " sessions)\n";
    std::signal(SIGINT, onSignal);
    std::signal(SIGTERM, onSignal);
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return kOk;
}

// ----------------------------------------------------------------- record

struct RecordArgs
{
    std::string scene;
    std::string out_script;
    std::uint64_t seed = 1;
    double t_overall = 300.0;
    double t_pushing = 10.0;
    std::uint64_t iterations = 0;
    std::uint64_t pushing_iterations = 0;
};

/// One operator command per line:
///   push <object> <x> <y> | select <object> | point <x> <y> | goal | quit
std::optional<std::vector<OperatorInput>> parseCommand(const std::string& line, std::string& error)
{
    std::istringstream in(line);
    std::string verb;
    if (!(in >> verb) || verb[0] == '#')
        return std::vector<OperatorInput>{};
    std::string object;
    double x = 0, y = 0;
    if (verb == "goal")
        return std::vector<OperatorInput>{ReachGoal{}};
    if (verb == "select" && (in >> object))
        return std::vector<OperatorInput>{SelectObject{object}};
    if (verb == "point" && (in >> x >> y))
        return std::vector<OperatorInput>{SelectPoint{{x, y}}};
    if (verb == "push" && (in >> object >> x >> y))
        return std::vector<OperatorInput>{SelectObject{object}, SelectPoint{{x, y}}};
    if (verb == "quit")
        return std::nullopt;
    error = "cannot read '" + line + "' (push <id> <x> <y> | select <id> | point <x> <y> | goal | quit)";
    return std::vector<OperatorInput>{};
}

int record(const RecordArgs& a)
{
    const Scene scene = loadSceneFile(a.scene);
    Budgets b;
    b.t_overall = a.t_overall;
    b.t_pushing = a.t_pushing;
    b.overall_iterations = a.iterations;
    b.pushing_iterations = a.pushing_iterations;

    std::mutex mu;
    std::condition_variable cv;
    OperatorScript script;
    std::optional<BenchmarkRecord> result;
    service::Session session(
        {"rec", std::filesystem::path(a.scene).stem().string(), scene, SessionMode::HITL, a.seed, b, std::nullopt},
        [&](const proto::ServerMessage& m) {
            std::cout << proto::encode(m) << std::endl;
            std::lock_guard lock(mu);
            if (const auto* o = std::get_if<proto::ActionOutcome>(&m))
                script.entries.push_back(o->action.action);
            if (const auto* c = std::get_if<proto::Closed>(&m)) {
                result = c->record;
                cv.notify_all();
            }
        });
    session.start();

    // stdin blocks, so it is read on its own thread.
    std::thread([&session] {
        std::string line;
        while (std::getline(std::cin, line)) {
            std::string error;
            const auto inputs = parseCommand(line, error);
            if (!error.empty())
                std::cerr << error << "\n";
            if (!inputs) {
                session.abort();
                return;
            }
            for (const auto& in : *inputs)
                if (auto why = session.input(in)) {
                    std::cerr << *why << "\n";
                    return;
                }
        }
        session.endInput();
    }).detach();

    {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return result.has_value(); });
    }
    session.join();
    if (script.entries.empty() || script.entries.back().object != scene.goalObject().id)
        script.entries.push_back(goalAction(scene));
    writeTextFile(a.out_script, serializeScript(script));
    std::cerr << "wrote " << script.entries.size() << " actions to " << a.out_script << "\n";
    return result->success ? kOk : kPlannerFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Guided planning for reaching through clutter"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-scenes", "Write seeded random shelf scenes");
    gen_cmd->add_option("--seed", gen.seed, "First seed")->required();
    gen_cmd->add_option("--count", gen.count, "Number of scenes")->required();
    gen_cmd->add_option("--objects", gen.objects, "Movable objects besides the goal")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory");

    PlanArgs pl;
    auto* plan_cmd = app.add_subcommand("plan", "Solve one scene and write its controls");
    plan_cmd->add_option("--scene", pl.scene, "Scene file")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--mode", pl.mode, "heuristic, namo, scripted, rrt or kpiece");
    plan_cmd->add_option("--seed", pl.seed, "Random seed");
    plan_cmd->add_option("--t-overall", pl.t_overall, "Overall budget (s)");
    plan_cmd->add_option("--t-pushing", pl.t_pushing, "Budget per push phase (s)");
    plan_cmd->add_option("--iterations", pl.iterations, "Deterministic mode: overall iteration budget");
    plan_cmd->add_option("--pushing-iterations", pl.pushing_iterations, "Deterministic mode: per push phase");
    plan_cmd->add_option("--max-actions", pl.max_actions, "Cap on high-level actions");
    plan_cmd->add_option("--script", pl.script, "Operator script (scripted mode)")->check(CLI::ExistingFile);
    plan_cmd->add_option("--out", pl.out, "Controls file to write")->required();

    std::string rp_scene, rp_controls;
    auto* replay_cmd = app.add_subcommand("replay", "Check a controls file against a scene");
    replay_cmd->add_option("--scene", rp_scene, "Scene file")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--controls", rp_controls, "Controls file")->required()->check(CLI::ExistingFile);

    std::string bm_config, bm_out;
    unsigned bm_workers = 0;
    auto* bench_cmd = app.add_subcommand("benchmark", "Run a scenes x modes x seeds grid");
    bench_cmd->add_option("--config", bm_config, "Benchmark config")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--out", bm_out, "Records (JSON lines)")->required();
    bench_cmd->add_option("--workers", bm_workers, "Override the config's worker count");

    std::string bind = "127.0.0.1:8765";
    int max_sessions = service::kDefaultMaxSessions;
    auto* serve_cmd = app.add_subcommand("serve", "Serve live sessions over WebSocket");
    serve_cmd->add_option("--bind", bind, "host:port");
    serve_cmd->add_option("--max-sessions", max_sessions, "Concurrent session cap")->check(CLI::Range(1, 64));

    RecordArgs rec;
    auto* record_cmd = app.add_subcommand(
        "record", "Guide one session from stdin (push <id> <x> <y> | select <id> | point <x> <y> | goal | quit) "
                  "and write the operator script");
    record_cmd->add_option("--scene", rec.scene, "Scene file")->required()->check(CLI::ExistingFile);
    record_cmd->add_option("--out-script", rec.out_script, "Operator script to write")->required();
    record_cmd->add_option("--seed", rec.seed, "Random seed");
    record_cmd->add_option("--t-overall", rec.t_overall, "Overall budget (s)");
    record_cmd->add_option("--t-pushing", rec.t_pushing, "Budget per push phase (s)");
    record_cmd->add_option("--iterations", rec.iterations, "Deterministic mode: overall iteration budget");
    record_cmd->add_option("--pushing-iterations", rec.pushing_iterations, "Deterministic mode: per push phase");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "\n" << app.help();
        return kUsage;
    }

    try {
        if (*gen_cmd)
            return genScenes(gen);
        if (*plan_cmd)
            return plan(pl);
        if (*replay_cmd)
            return replay(rp_scene, rp_controls);
        if (*bench_cmd)
            return benchmark(bm_config, bm_out, bm_workers);
        if (*serve_cmd)
            return serve(bind, max_sessions);
        if (*record_cmd)
            return record(rec);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const SceneError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
