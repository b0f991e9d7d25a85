#pragma once

// Experiment cells (one scene, one mode, one seed) and the harness that runs
// a grid of them and summarizes per mode.

#include <atomic>
#include <functional>
#include <span>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtc/strategies.hpp"

namespace rtc {

enum class SessionMode
{
    HITL,
    Heuristic,
    NAMO,
    Scripted,
    BareRRT,
    BareKPIECE,
};

std::string_view sessionModeName(SessionMode m);
/// Throws ContractError for unknown names.
SessionMode parseSessionMode(std::string_view name);

struct BenchmarkRecord
{
    std::string scene_id;
    SessionMode mode = SessionMode::BareRRT;
    std::uint64_t seed = 0;
    bool success = false;
    std::string status; ///< GrtcStatus name, or "Crashed"
    double planning_time = 0.0;
    double guidance_time = 0.0;
    std::size_t proposed_actions = 0;
    std::size_t successful_actions = 0;
    double idle_time = 0.0;
    std::uint64_t iterations = 0;
    std::size_t control_count = 0;
    /// FNV-1a over the bit patterns of the full control sequence.
    std::string controls_digest;
    std::string diagnostic;

    /// Same outcome ignoring clock readings (times).
    bool sameOutcome(const BenchmarkRecord& o) const;
};

nlohmann::json recordToJson(const BenchmarkRecord& r);
BenchmarkRecord recordFromJson(const nlohmann::json& j);
std::string controlsDigest(std::span<const Control> controls);

/// Low-level planner of a mode: RRT everywhere except BareKPIECE.
PlannerConfig plannerFor(SessionMode mode, std::uint64_t seed);

/// Strategy for a non-interactive mode (throws ContractError for HITL, or for
/// Scripted without a script).
std::unique_ptr<HighLevelStrategy> makeStrategy(SessionMode mode, std::uint64_t seed, const Budgets& budgets,
                                                const std::optional<OperatorScript>& script,
                                                const std::atomic<bool>* cancel = nullptr);

BenchmarkRecord makeRecord(const std::string& scene_id, SessionMode mode, std::uint64_t seed, const GrtcOutcome& out);

/// Runs one cell; exceptions become a failed record with a diagnostic.
BenchmarkRecord runCell(const Scene& scene, const std::string& scene_id, SessionMode mode, std::uint64_t seed,
                        const Budgets& budgets, const std::optional<OperatorScript>& script);

struct BenchmarkScene
{
    std::string id;
    Scene scene;
    std::optional<OperatorScript> script;
};

struct BenchmarkConfig
{
    std::vector<BenchmarkScene> scenes;
    std::vector<SessionMode> modes;
    std::vector<std::uint64_t> seeds;
    Budgets budgets;
    unsigned workers = 1;
};

/// Reads a benchmark config document. Relative paths resolve against
/// `base_dir`. Throws ParseError.
BenchmarkConfig parseBenchmarkConfig(std::string_view text, const std::string& base_dir);

/// Every (scene, mode, seed) cell, in that nesting order regardless of the
/// worker count. `progress` is called (serialized) as each cell finishes.
std::vector<BenchmarkRecord> runBenchmark(const BenchmarkConfig& config,
                                          const std::function<void(const BenchmarkRecord&)>& progress = {});

struct Interval
{
    double mean = 0.0;
    double half_width = 0.0; ///< 95% Student t; NaN for fewer than two samples
    std::size_t n = 0;
};

/// Mean with a two-sided 95% confidence interval.
Interval meanInterval(std::span<const double> xs);

struct ModeSummary
{
    SessionMode mode = SessionMode::BareRRT;
    std::size_t cells = 0;
    std::size_t successes = 0;
    Interval success_rate;
    /// Over successful cells only.
    Interval planning_time;
    Interval guidance_time;
    Interval proposed_actions;
    Interval successful_actions;
};

std::vector<ModeSummary> summarize(std::span<const BenchmarkRecord> records);
std::string summaryTable(std::span<const ModeSummary> summaries);

} // namespace rtc
