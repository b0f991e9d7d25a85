#pragma once

// Guided planning loop: a strategy proposes high-level actions (push an object
// toward a target point, or reach the goal object), and each push is planned
// in two phases, first to an approaching pose next to the object and then to
// the target region.

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtc/planners.hpp"

namespace rtc {

struct HighLevelAction
{
    std::string object;
    /// Target-region centroid. Present iff `object` is not the goal object.
    std::optional<Vec2> centroid;

    friend bool operator==(const HighLevelAction&, const HighLevelAction&) = default;
};

inline HighLevelAction goalAction(const Scene& scene) { return {scene.goalObject().id, std::nullopt}; }
bool isGoalAction(const HighLevelAction& a, const Scene& scene);
/// Throws ContractError for unknown objects or a centroid on the wrong kind
/// of action.
void validateAction(const HighLevelAction& a, const Scene& scene);

struct Budgets
{
    double t_overall = 300.0; ///< seconds, guidance included
    double t_pushing = 10.0;  ///< seconds per push phase
    /// Deterministic mode: when non-zero, planner calls are capped by tree
    /// iterations instead of seconds and no wall-clock limit applies.
    std::uint64_t overall_iterations = 0;
    std::uint64_t pushing_iterations = 0;
    /// Guard against strategies that never return the goal action.
    std::size_t max_actions = 1000;

    bool iterationMode() const { return overall_iterations > 0; }
};

void validateBudgets(const Budgets& b);

struct PlannerConfig
{
    Algorithm algorithm = Algorithm::RRT;
    PlannerParams params;
    std::uint64_t seed = 0;
    /// Shared with every planner call; setting it aborts the loop.
    const std::atomic<bool>* cancel = nullptr;
};

/// Per-call planner seeds. The first call gets the base seed itself, so a
/// loop that only ever reaches for the goal reproduces a direct planner call.
class SeedSequence
{
public:
    explicit SeedSequence(std::uint64_t base) : base_(base) {}
    std::uint64_t next() { return count_++ == 0 ? base_ : splitmix64(base_ + count_); }

private:
    std::uint64_t base_;
    std::uint64_t count_ = 0;
};

inline constexpr double kApproachClearance = 0.02;
inline constexpr double kApproachTolXY = 0.03;
inline constexpr double kApproachTolTheta = 0.35;

struct ApproachingStates
{
    Pose2 side;    ///< beside the object, facing it
    Pose2 forward; ///< behind the object, facing the push direction
};

/// Throws ContractError when the centroid coincides with the object center.
ApproachingStates computeApproachingStates(const SystemConfiguration& q, const std::string& object, Vec2 centroid,
                                           const Scene& scene);

/// Remaining overall allowance handed to one action.
struct Allowance
{
    double seconds = std::numeric_limits<double>::infinity();
    std::uint64_t iterations = 0; ///< 0 = unlimited
};

struct ActionResult
{
    bool success = false;
    SystemConfiguration state; ///< unchanged on failure
    std::vector<Control> controls;
    double plan_time = 0.0;
    std::uint64_t iterations = 0;
    PlanStatus approach_status = PlanStatus::Infeasible;
    std::optional<PlanStatus> push_status;
};

/// Plans and executes one push. Nothing is executed unless both phases succeed.
ActionResult executeHighLevelAction(const SystemConfiguration& q, const HighLevelAction& a, const Scene& scene,
                                    const Budgets& budgets, const PlannerConfig& config, SeedSequence& seeds,
                                    Allowance allowance = {});

struct StrategyContext
{
    const Scene& scene;
    /// Wall-clock deadline for blocking strategies; empty in iteration mode.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

class HighLevelStrategy
{
public:
    virtual ~HighLevelStrategy() = default;
    /// Next action, or nullopt when the strategy has nothing more to offer.
    virtual std::optional<HighLevelAction> next(const SystemConfiguration& q, const StrategyContext& ctx) = 0;
    /// Called after every executed action.
    virtual void outcome(const HighLevelAction&, bool /*success*/, const SystemConfiguration& /*q*/) {}
};

/// Strategy that always asks for the goal object.
class ImmediateGoalStrategy final : public HighLevelStrategy
{
public:
    std::optional<HighLevelAction> next(const SystemConfiguration&, const StrategyContext& ctx) override
    {
        return goalAction(ctx.scene);
    }
};

enum class GrtcStatus
{
    Success,
    OverallTimeout,
    StrategyExhausted,
    Aborted,
};

std::string_view grtcStatusName(GrtcStatus s);

struct ExecutedAction
{
    HighLevelAction action;
    bool success = false;
    double plan_time = 0.0;
    double guidance_time = 0.0; ///< time the strategy took to propose it
    PlanStatus approach_status = PlanStatus::Infeasible; ///< the only phase for goal actions
    std::optional<PlanStatus> push_status;
};

struct GrtcOutcome
{
    GrtcStatus status = GrtcStatus::OverallTimeout;
    std::vector<ExecutedAction> executed_actions;
    double guidance_time = 0.0;
    double planning_time = 0.0;
    std::uint64_t iterations = 0;
    SystemConfiguration final_state;
    std::vector<Control> full_controls;

    std::size_t successfulActions() const;
};

/// Called after each executed action with the state that follows it.
using GrtcObserver = std::function<void(const ExecutedAction&, const SystemConfiguration&)>;

struct GrtcHooks
{
    /// An action was accepted and planning for it starts.
    std::function<void(const HighLevelAction&)> planning;
    GrtcObserver executed;
};

/// Planner calls shorter than this cannot do useful work; the loop stops
/// instead of starting one.
inline constexpr double kMinPlanningSlice = 0.01;

GrtcOutcome runGRTC(const Scene& scene, HighLevelStrategy& strategy, const Budgets& budgets,
                    const PlannerConfig& config, const GrtcHooks& hooks);
inline GrtcOutcome runGRTC(const Scene& scene, HighLevelStrategy& strategy, const Budgets& budgets,
                           const PlannerConfig& config, const GrtcObserver& observer = {})
{
    return runGRTC(scene, strategy, budgets, config, GrtcHooks{{}, observer});
}

/// One JSON object per executed action, for line-delimited event logs.
std::string eventLogLine(std::size_t index, const ExecutedAction& e);

} // namespace rtc
