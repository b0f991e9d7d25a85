#include "rtc/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "codec.hpp"
#include "rtc/errors.hpp"
#include "rtc/formats.hpp"

namespace rtc {

using detail::Reader;
using nlohmann::json;

namespace {

constexpr std::pair<SessionMode, std::string_view> kModeNames[] = {
    {SessionMode::HITL, "HITL"},         {SessionMode::Heuristic, "Heuristic"}, {SessionMode::NAMO, "NAMO"},
    {SessionMode::Scripted, "Scripted"}, {SessionMode::BareRRT, "BareRRT"},     {SessionMode::BareKPIECE, "BareKPIECE"},
};

// Strategy randomness is kept apart from the planner seed sequence.
std::uint64_t strategySeed(std::uint64_t seed) { return splitmix64(seed ^ 0x5eed5eed5eed5eedULL); }

} // namespace

std::string_view sessionModeName(SessionMode m)
{
    for (const auto& [mode, name] : kModeNames)
        if (mode == m)
            return name;
    return "Unknown";
}

SessionMode parseSessionMode(std::string_view name)
{
    for (const auto& [mode, n] : kModeNames)
        if (n == name)
            return mode;
    throw ContractError("unknown mode '" + std::string(name) + "'");
}

bool BenchmarkRecord::sameOutcome(const BenchmarkRecord& o) const
{
    return scene_id == o.scene_id && mode == o.mode && seed == o.seed && success == o.success && status == o.status &&
           proposed_actions == o.proposed_actions && successful_actions == o.successful_actions &&
           iterations == o.iterations && control_count == o.control_count && controls_digest == o.controls_digest;
}

std::string controlsDigest(std::span<const Control> controls)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    };
    for (const Control& u : controls) {
        mix(u.vx);
        mix(u.vy);
        mix(u.omega);
        mix(u.duration);
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

json recordToJson(const BenchmarkRecord& r)
{
    return {{"scene_id", r.scene_id},
            {"mode", sessionModeName(r.mode)},
            {"seed", r.seed},
            {"success", r.success},
            {"status", r.status},
            {"planning_time", r.planning_time},
            {"guidance_time", r.guidance_time},
            {"proposed_actions", r.proposed_actions},
            {"successful_actions", r.successful_actions},
            {"idle_time", r.idle_time},
            {"iterations", r.iterations},
            {"control_count", r.control_count},
            {"controls_digest", r.controls_digest},
            {"diagnostic", r.diagnostic}};
}

BenchmarkRecord recordFromJson(const json& j)
{
    const Reader r(j, "", "benchmark record");
    BenchmarkRecord out;
    out.scene_id = r.at("scene_id").string();
    try {
        out.mode = parseSessionMode(r.at("mode").string());
    } catch (const ContractError& e) {
        r.at("mode").fail(e.what());
    }
    out.seed = r.at("seed").unsignedInt();
    out.success = r.at("success").boolean();
    out.status = r.at("status").string();
    out.planning_time = r.at("planning_time").number();
    out.guidance_time = r.at("guidance_time").number();
    out.proposed_actions = r.at("proposed_actions").unsignedInt();
    out.successful_actions = r.at("successful_actions").unsignedInt();
    out.idle_time = r.at("idle_time").number();
    out.iterations = r.at("iterations").unsignedInt();
    out.control_count = r.at("control_count").unsignedInt();
    out.controls_digest = r.at("controls_digest").string();
    out.diagnostic = r.at("diagnostic").string();
    if (out.successful_actions > out.proposed_actions)
        r.at("successful_actions").fail("exceeds proposed_actions");
    return out;
}

PlannerConfig plannerFor(SessionMode mode, std::uint64_t seed)
{
    PlannerConfig cfg;
    cfg.algorithm = mode == SessionMode::BareKPIECE ? Algorithm::KPIECE : Algorithm::RRT;
    cfg.seed = seed;
    return cfg;
}

std::unique_ptr<HighLevelStrategy> makeStrategy(SessionMode mode, std::uint64_t seed, const Budgets& budgets,
                                                const std::optional<OperatorScript>& script,
                                                const std::atomic<bool>* cancel)
{
    switch (mode) {
    case SessionMode::BareRRT:
    case SessionMode::BareKPIECE:
        return std::make_unique<ImmediateGoalStrategy>();
    case SessionMode::Heuristic:
        return std::make_unique<HeuristicStrategy>(strategySeed(seed));
    case SessionMode::NAMO: {
        NamoParams params;
        params.plan_seconds = budgets.t_pushing;
        params.plan_iterations = budgets.pushing_iterations;
        PlannerConfig cfg = plannerFor(mode, strategySeed(seed));
        cfg.cancel = cancel;
        return std::make_unique<NamoStrategy>(cfg, strategySeed(seed), params);
    }
    case SessionMode::Scripted:
        if (!script)
            throw ContractError("Scripted mode needs an operator script");
        return std::make_unique<ScriptedStrategy>(*script);
    case SessionMode::HITL:
        break;
    }
    throw ContractError("HITL mode needs a live operator");
}

BenchmarkRecord makeRecord(const std::string& scene_id, SessionMode mode, std::uint64_t seed, const GrtcOutcome& out)
{
    BenchmarkRecord r;
    r.scene_id = scene_id;
    r.mode = mode;
    r.seed = seed;
    r.success = out.status == GrtcStatus::Success;
    r.status = std::string(grtcStatusName(out.status));
    r.planning_time = out.planning_time;
    r.guidance_time = out.guidance_time;
    r.proposed_actions = out.executed_actions.size();
    r.successful_actions = out.successfulActions();
    r.iterations = out.iterations;
    r.control_count = out.full_controls.size();
    r.controls_digest = controlsDigest(out.full_controls);
    return r;
}

BenchmarkRecord runCell(const Scene& scene, const std::string& scene_id, SessionMode mode, std::uint64_t seed,
                        const Budgets& budgets, const std::optional<OperatorScript>& script)
{
    try {
        if (script && mode == SessionMode::Scripted)
            validateScript(*script, scene);
        auto strategy = makeStrategy(mode, seed, budgets, script);
        const GrtcOutcome out = runGRTC(scene, *strategy, budgets, plannerFor(mode, seed));
        return makeRecord(scene_id, mode, seed, out);
    } catch (const std::exception& e) {
        BenchmarkRecord r;
        r.scene_id = scene_id;
        r.mode = mode;
        r.seed = seed;
        r.status = "Crashed";
        r.controls_digest = controlsDigest({});
        r.diagnostic = e.what();
        return r;
    }
}

BenchmarkConfig parseBenchmarkConfig(std::string_view text, const std::string& base_dir)
{
    const json doc = detail::parseJson(text, "benchmark config");
    const Reader root(doc, "", "benchmark config");
    root.expectVersion(1);
    namespace fs = std::filesystem;
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path.string() : (fs::path(base_dir) / path).string();
    };

    BenchmarkConfig cfg;
    if (root.has("generate")) {
        const Reader g = root.at("generate");
        const std::uint64_t first = g.at("seed").unsignedInt();
        const std::uint64_t count = g.at("count").unsignedInt();
        const std::uint64_t objects = g.at("objects").unsignedInt();
        if (objects < 1)
            g.at("objects").fail("must be at least 1");
        for (std::uint64_t k = 0; k < count; ++k)
            cfg.scenes.push_back({"seed" + std::to_string(first + k),
                                  generateRandomScene(first + k, static_cast<int>(objects)), std::nullopt});
    }
    if (root.has("scenes")) {
        const Reader list = root.at("scenes");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Reader e = list[i];
            const std::string file = resolve(e.at("file").string());
            const std::string id = e.has("id") ? e.at("id").string() : fs::path(file).stem().string();
            std::optional<OperatorScript> script;
            if (e.has("script"))
                script = parseScript(readTextFile(resolve(e.at("script").string())));
            cfg.scenes.push_back({id, loadSceneFile(file), std::move(script)});
        }
    }
    if (cfg.scenes.empty())
        root.fail("no scenes (give 'scenes' and/or 'generate')");

    const Reader modes = root.at("modes");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        try {
            const SessionMode m = parseSessionMode(modes[i].string());
            if (m == SessionMode::HITL)
                modes[i].fail("HITL cannot run unattended; record scripts and use Scripted");
            cfg.modes.push_back(m);
        } catch (const ContractError& e) {
            modes[i].fail(e.what());
        }
    }
    const Reader seeds = root.at("seeds");
    if (seeds.raw().is_array()) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            cfg.seeds.push_back(seeds[i].unsignedInt());
    } else {
        for (std::uint64_t s = 1; s <= seeds.unsignedInt(); ++s)
            cfg.seeds.push_back(s);
    }
    if (root.has("budgets"))
        cfg.budgets = detail::budgetsFromJson(root.at("budgets"));
    if (root.has("workers"))
        cfg.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, root.at("workers").unsignedInt()));
    return cfg;
}

std::vector<BenchmarkRecord> runBenchmark(const BenchmarkConfig& config,
                                          const std::function<void(const BenchmarkRecord&)>& progress)
{
    struct Cell
    {
        const BenchmarkScene* scene;
        SessionMode mode;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const BenchmarkScene& s : config.scenes)
        for (SessionMode m : config.modes)
            for (std::uint64_t seed : config.seeds)
                cells.push_back({&s, m, seed});

    std::vector<BenchmarkRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex progress_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const Cell& c = cells[i];
            records[i] = runCell(c.scene->scene, c.scene->id, c.mode, c.seed, config.budgets, c.scene->script);
            if (progress) {
                std::lock_guard lock(progress_mu);
                progress(records[i]);
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return records;
}

Interval meanInterval(std::span<const double> xs)
{
    Interval out;
    out.n = xs.size();
    if (xs.empty()) {
        out.mean = std::numeric_limits<double>::quiet_NaN();
        out.half_width = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) {
        out.half_width = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double ss = 0.0;
    for (double x : xs)
        ss += (x - out.mean) * (x - out.mean);
    const double n = static_cast<double>(xs.size());
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    out.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
    return out;
}

std::vector<ModeSummary> summarize(std::span<const BenchmarkRecord> records)
{
    std::vector<ModeSummary> out;
    for (const auto& [mode, name] : kModeNames) {
        std::vector<double> success, plan, guide, proposed, successful;
        for (const BenchmarkRecord& r : records) {
            if (r.mode != mode)
                continue;
            success.push_back(r.success ? 1.0 : 0.0);
            if (r.success)
                plan.push_back(r.planning_time);
            guide.push_back(r.guidance_time);
            proposed.push_back(static_cast<double>(r.proposed_actions));
            successful.push_back(static_cast<double>(r.successful_actions));
        }
        if (success.empty())
            continue;
        ModeSummary s;
        s.mode = mode;
        s.cells = success.size();
        s.successes = static_cast<std::size_t>(std::count(success.begin(), success.end(), 1.0));
        s.success_rate = meanInterval(success);
        s.planning_time = meanInterval(plan);
        s.guidance_time = meanInterval(guide);
        s.proposed_actions = meanInterval(proposed);
        s.successful_actions = meanInterval(successful);
        out.push_back(s);
    }
    return out;
}

std::string summaryTable(std::span<const ModeSummary> summaries)
{
    std::ostringstream ss;
    auto ci = [&ss](const Interval& i, int prec) {
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(prec) << i.mean;
        if (std::isfinite(i.half_width))
            cell << " +-" << i.half_width;
        ss << std::setw(20) << cell.str();
    };
    ss << std::left << std::setw(12) << "mode" << std::right << std::setw(7) << "cells" << std::setw(20) << "success"
       << std::setw(20) << "plan time (s)" << std::setw(20) << "guidance (s)" << std::setw(20) << "proposed"
       << std::setw(20) << "successful" << "\n";
    for (const ModeSummary& s : summaries) {
        ss << std::left << std::setw(12) << sessionModeName(s.mode) << std::right << std::setw(7) << s.cells;
        ci(s.success_rate, 2);
        ci(s.planning_time, 2);
        ci(s.guidance_time, 3);
        ci(s.proposed_actions, 1);
        ci(s.successful_actions, 1);
        ss << "\n";
    }
    return ss.str();
}

} // namespace rtc
