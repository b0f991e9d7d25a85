#pragma once

// Sources of high-level actions for the guided loop: a straight-line
// heuristic, a backward NAMO-style planner, a scripted operator and a bridge
// to a live human operator.

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <variant>

#include "rtc/grtc.hpp"

namespace rtc {

// ---------------------------------------------------------------- heuristic

struct HeuristicParams
{
    int local_samples = 200;
    double local_radius = 0.30;
    int global_samples = 2000;
    double sweep_step = 0.01;
};

/// Robot footprint swept in a straight line from its current pose to the goal
/// object's center, keeping the current heading.
Corridor goalCorridor(const SystemConfiguration& q, const Scene& scene, double step = 0.01);

struct BlockingObstacle
{
    std::size_t index;  ///< into scene.movables()
    double arc_length;  ///< distance along the sweep to first contact
};

/// Movable (never the goal object) that the sweep enters first.
std::optional<BlockingObstacle> firstBlockingObstacle(const SystemConfiguration& q, const Scene& scene,
                                                      const Corridor& corridor);

/// Object `index` placed at `centroid` with its current heading lies inside
/// the workspace, overlaps no other body and stays clear of `keep_out`.
bool placementValid(const SystemConfiguration& q, const Scene& scene, std::size_t index, Vec2 centroid,
                    std::span<const Polygon> keep_out, double margin = 0.0);

/// nullopt when no placement was found (strategy exhausted).
std::optional<HighLevelAction> heuristicNext(const SystemConfiguration& q, const Scene& scene, Rng& rng,
                                             const HeuristicParams& params = {});

class HeuristicStrategy final : public HighLevelStrategy
{
public:
    explicit HeuristicStrategy(std::uint64_t seed, HeuristicParams params = {}) : rng_(seed), params_(params) {}
    std::optional<HighLevelAction> next(const SystemConfiguration& q, const StrategyContext& ctx) override
    {
        return heuristicNext(q, ctx.scene, rng_, params_);
    }

private:
    Rng rng_;
    HeuristicParams params_;
};

// --------------------------------------------------------------------- NAMO

struct NamoParams
{
    int placement_samples = 500;
    /// Keep-out inflation, beyond the target-region radius, when testing
    /// placements against swept volumes.
    double margin = 0.01;
    /// Budget of each internal planner call.
    double plan_seconds = 10.0;
    std::uint64_t plan_iterations = 0;
    /// Free placements per object whose push may fail to plan before the
    /// object counts as having no usable placement.
    int plan_attempts = 3;
};

enum class NamoStatus
{
    Plan,
    PlacementExhausted,
    PlanningFailed,
};

std::string_view namoStatusName(NamoStatus s);

struct NamoResult
{
    NamoStatus status = NamoStatus::PlanningFailed;
    /// Pushes in execution order followed by the goal action (status Plan).
    std::vector<HighLevelAction> actions;
    /// Accumulated swept volume: robot and pushed-object footprints.
    std::vector<Polygon> swept;
    /// Robot swept volume of the initial reach through movables.
    std::vector<Polygon> reach_corridor;
    std::string failed_object;
    /// For PlacementExhausted: samples of the failed object rejected because
    /// they touch the swept volume or another body, and free samples the
    /// push to which could not be planned.
    int rejected_blocked = 0;
    int rejected_unplannable = 0;
};

/// Robot footprint swept along a control sequence (the robot is kinematic, so
/// this does not depend on contacts). Pieces advance at most `step` meters
/// or 0.05 rad, so the chord error of a turning footprint stays below
/// 0.1 mm at shelf scale.
std::vector<Polygon> robotSweptVolume(const Pose2& start, std::span<const Control> controls, const ConvexShape& robot,
                                      double step = 0.02);

bool intersectsAny(const ConvexShape& shape, const Pose2& pose, std::span<const Polygon> volume, double margin);

NamoResult namoNext(const SystemConfiguration& q, const Scene& scene, const PlannerConfig& planner, Rng& rng,
                    const NamoParams& params = {});

/// Plans once with namoNext and hands out its actions in order. Replans when
/// the queue runs dry before the goal action; exhausted on PlacementExhausted
/// or planning failure.
class NamoStrategy final : public HighLevelStrategy
{
public:
    NamoStrategy(PlannerConfig planner, std::uint64_t seed, NamoParams params = {})
        : planner_(std::move(planner)), rng_(seed), params_(params)
    {
    }
    std::optional<HighLevelAction> next(const SystemConfiguration& q, const StrategyContext& ctx) override;
    void outcome(const HighLevelAction& a, bool success, const SystemConfiguration& q) override;
    const std::optional<NamoResult>& lastResult() const { return last_; }

private:
    PlannerConfig planner_;
    Rng rng_;
    NamoParams params_;
    std::deque<HighLevelAction> queue_;
    std::optional<NamoResult> last_;
};

// ----------------------------------------------------------------- scripted

struct OperatorScript
{
    std::vector<HighLevelAction> entries;
    friend bool operator==(const OperatorScript&, const OperatorScript&) = default;
};

/// Throws ContractError unless every entry is valid for `scene` and the last
/// one is the goal action.
void validateScript(const OperatorScript& s, const Scene& scene);

class ScriptedStrategy final : public HighLevelStrategy
{
public:
    /// Throws ContractError for an empty script.
    explicit ScriptedStrategy(OperatorScript script);
    std::optional<HighLevelAction> next(const SystemConfiguration&, const StrategyContext&) override;
    std::size_t calls() const { return calls_; }
    const OperatorScript& script() const { return script_; }

private:
    OperatorScript script_;
    std::size_t cursor_ = 0;
    std::size_t calls_ = 0;
};

// -------------------------------------------------------------------- human

struct SelectObject
{
    std::string object;
};
struct SelectPoint
{
    Vec2 point;
};
struct ReachGoal
{
};
using OperatorInput = std::variant<SelectObject, SelectPoint, ReachGoal>;

/// Single-producer single-consumer queue between the service (operator
/// messages) and the planning loop.
class OperatorInbox
{
public:
    void push(OperatorInput in);
    /// No more input: queued items still drain, then pop returns nullopt.
    void close();
    bool closed() const;
    /// Waits for input until `deadline` (forever when empty). Returns nullopt
    /// when closed and drained, or timed out.
    std::optional<OperatorInput> pop(std::optional<std::chrono::steady_clock::time_point> deadline);

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<OperatorInput> items_;
    bool closed_ = false;
};

/// Turns operator selections into actions: an object, then (unless it is the
/// goal object) a target point.
class HumanBridgeStrategy final : public HighLevelStrategy
{
public:
    struct Hooks
    {
        /// Called with true when input is requested and false once it arrives.
        std::function<void(bool)> awaiting;
        /// Rejected input (unknown object, point before object).
        std::function<void(const std::string&)> rejected;
    };

    HumanBridgeStrategy(std::shared_ptr<OperatorInbox> inbox, Hooks hooks = {})
        : inbox_(std::move(inbox)), hooks_(std::move(hooks))
    {
    }
    std::optional<HighLevelAction> next(const SystemConfiguration& q, const StrategyContext& ctx) override;

private:
    std::shared_ptr<OperatorInbox> inbox_;
    Hooks hooks_;
};

} // namespace rtc
