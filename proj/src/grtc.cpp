#include "rtc/grtc.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "rtc/errors.hpp"

namespace rtc {

using Clock = std::chrono::steady_clock;

namespace {

double secondsSince(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double staticClearance(Vec2 p, const Scene& scene)
{
    double best = std::numeric_limits<double>::infinity();
    for (const BodySpec& s : scene.statics())
        best = std::min(best, signedDistance(s.shape, s.initial_pose, p));
    return best;
}

// Limits for one planner call given what the action and the whole run have
// left. Returns nullopt when there is nothing left to spend.
struct CallLimits
{
    double seconds;
    std::uint64_t iterations;
};

std::optional<CallLimits> phaseLimits(const Budgets& b, Allowance allowance, double spent_seconds,
                                      std::uint64_t spent_iterations)
{
    if (b.iterationMode()) {
        std::uint64_t cap = b.pushing_iterations;
        if (allowance.iterations > 0) {
            if (spent_iterations >= allowance.iterations)
                return std::nullopt;
            const std::uint64_t left = allowance.iterations - spent_iterations;
            cap = cap == 0 ? left : std::min(cap, left);
        }
        return CallLimits{std::numeric_limits<double>::infinity(), cap};
    }
    const double seconds = std::min(b.t_pushing, allowance.seconds - spent_seconds);
    if (seconds < kMinPlanningSlice)
        return std::nullopt;
    return CallLimits{seconds, 0};
}

PlanResult timedOut(const SystemConfiguration& start)
{
    PlanResult r;
    r.status = PlanStatus::TimedOut;
    r.final_state = start;
    return r;
}

} // namespace

bool isGoalAction(const HighLevelAction& a, const Scene& scene)
{
    return a.object == scene.goalObject().id && !a.centroid;
}

void validateAction(const HighLevelAction& a, const Scene& scene)
{
    scene.requireMovable(a.object);
    const bool goal = a.object == scene.goalObject().id;
    if (goal && a.centroid)
        throw ContractError("goal-object action must not carry a centroid");
    if (!goal && !a.centroid)
        throw ContractError("push action on '" + a.object + "' needs a centroid");
    if (a.centroid && !(std::isfinite(a.centroid->x) && std::isfinite(a.centroid->y)))
        throw ContractError("centroid must be finite");
}

void validateBudgets(const Budgets& b)
{
    if (!(b.t_pushing > 0.0) || !(b.t_pushing <= b.t_overall))
        throw ContractError("budgets must satisfy 0 < t_pushing <= t_overall");
    if (b.pushing_iterations > 0 && b.overall_iterations == 0)
        throw ContractError("pushing_iterations requires overall_iterations");
    if (b.max_actions == 0)
        throw ContractError("max_actions must be positive");
}

std::string_view grtcStatusName(GrtcStatus s)
{
    switch (s) {
    case GrtcStatus::Success:
        return "Success";
    case GrtcStatus::OverallTimeout:
        return "OverallTimeout";
    case GrtcStatus::StrategyExhausted:
        return "StrategyExhausted";
    case GrtcStatus::Aborted:
        return "Aborted";
    }
    return "Unknown";
}

std::size_t GrtcOutcome::successfulActions() const
{
    return static_cast<std::size_t>(
        std::count_if(executed_actions.begin(), executed_actions.end(), [](const ExecutedAction& e) { return e.success; }));
}

ApproachingStates computeApproachingStates(const SystemConfiguration& q, const std::string& object, Vec2 centroid,
                                           const Scene& scene)
{
    const std::size_t i = scene.requireMovable(object);
    const Pose2& pose = q.objects[i];
    const Vec2 c = pose.position();
    const Vec2 delta = centroid - c;
    const double len = norm(delta);
    if (len < 1e-6)
        throw ContractError("approaching states: centroid coincides with the object center");

    const Vec2 u = (1.0 / len) * delta;
    const double m = minEnclosingCircle(scene.movables()[i].shape, pose).radius;
    const double reach = m + scene.robot().shape.circumradius() + kApproachClearance;

    ApproachingStates out;
    const Vec2 behind = c - reach * u;
    out.forward = Pose2(behind.x, behind.y, std::atan2(u.y, u.x));

    // Side pose: left of the push direction unless the right has more room.
    const Vec2 left = perp(u);
    Vec2 side = c + reach * left;
    const Vec2 right_side = c - reach * left;
    if (staticClearance(right_side, scene) > staticClearance(side, scene))
        side = right_side;
    const Vec2 facing = c - side;
    out.side = Pose2(side.x, side.y, std::atan2(facing.y, facing.x));
    return out;
}

ActionResult executeHighLevelAction(const SystemConfiguration& q, const HighLevelAction& a, const Scene& scene,
                                    const Budgets& budgets, const PlannerConfig& config, SeedSequence& seeds,
                                    Allowance allowance)
{
    validateAction(a, scene);
    if (isGoalAction(a, scene))
        throw ContractError("executeHighLevelAction: the goal action is not a push");

    ActionResult r;
    r.state = q;
    // A target on the object's own center has no push direction: nothing to do.
    if (norm(*a.centroid - q.objects[scene.requireMovable(a.object)].position()) < 1e-6)
        return r;
    const ApproachingStates approach = computeApproachingStates(q, a.object, *a.centroid, scene);

    auto runPhase = [&](const SystemConfiguration& start, GoalSpec goal) {
        const auto limits = phaseLimits(budgets, allowance, r.plan_time, r.iterations);
        if (!limits)
            return timedOut(start);
        PlannerRequest req;
        req.start = start;
        req.goal = std::move(goal);
        req.time_budget = limits->seconds;
        req.max_iterations = limits->iterations;
        req.rng_seed = seeds.next();
        req.algorithm = config.algorithm;
        req.params = config.params;
        req.cancel = config.cancel;
        PlanResult res = plan(req, scene);
        r.plan_time += res.stats.wall_time;
        r.iterations += res.stats.iterations;
        return res;
    };

    const PlanResult reach =
        runPhase(q, RobotPoseSet{{approach.side, approach.forward}, kApproachTolXY, kApproachTolTheta});
    r.approach_status = reach.status;
    if (reach.status != PlanStatus::Solved)
        return r;

    const PlanResult push = runPhase(reach.final_state, ObjectInRegion{a.object, *a.centroid, scene.regionDiameter()});
    r.push_status = push.status;
    if (push.status != PlanStatus::Solved)
        return r;

    std::vector<Control> controls = reach.controls;
    controls.insert(controls.end(), push.controls.begin(), push.controls.end());
    const Rollout rollout = rolloutControls(q, controls, scene);
    if (!rollout.report.valid)
        return r;
    r.success = true;
    r.state = rollout.trajectory.back();
    r.controls = std::move(controls);
    return r;
}

GrtcOutcome runGRTC(const Scene& scene, HighLevelStrategy& strategy, const Budgets& budgets,
                    const PlannerConfig& config, const GrtcHooks& hooks)
{
    validateBudgets(budgets);
    validateParams(config.params);

    GrtcOutcome out;
    out.final_state = scene.initialConfiguration();
    SeedSequence seeds(config.seed);
    const auto t0 = Clock::now();
    const bool iter_mode = budgets.iterationMode();
    std::optional<Clock::time_point> deadline;
    if (!iter_mode)
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budgets.t_overall));

    auto record = [&](ExecutedAction e) {
        out.executed_actions.push_back(std::move(e));
        if (hooks.executed)
            hooks.executed(out.executed_actions.back(), out.final_state);
    };

    auto cancelled = [&] { return config.cancel && config.cancel->load(std::memory_order_relaxed); };
    for (;;) {
        if (cancelled()) {
            out.status = GrtcStatus::Aborted;
            break;
        }
        if (out.executed_actions.size() >= budgets.max_actions) {
            out.status = GrtcStatus::StrategyExhausted;
            break;
        }
        if (iter_mode ? out.iterations >= budgets.overall_iterations
                      : secondsSince(t0) >= budgets.t_overall - kMinPlanningSlice) {
            out.status = GrtcStatus::OverallTimeout;
            break;
        }

        const auto g0 = Clock::now();
        const std::optional<HighLevelAction> action = strategy.next(out.final_state, StrategyContext{scene, deadline});
        const double guidance = secondsSince(g0);
        out.guidance_time += guidance;
        if (!action) {
            out.status = cancelled() ? GrtcStatus::Aborted : GrtcStatus::StrategyExhausted;
            break;
        }
        validateAction(*action, scene);
        if (hooks.planning)
            hooks.planning(*action);

        const double remaining = budgets.t_overall - secondsSince(t0);
        if (!iter_mode && remaining < kMinPlanningSlice) {
            out.status = GrtcStatus::OverallTimeout;
            break;
        }
        const std::uint64_t iterations_left = iter_mode ? budgets.overall_iterations - out.iterations : 0;

        if (isGoalAction(*action, scene)) {
            PlannerRequest req;
            req.start = out.final_state;
            req.goal = ReachGoalObject{};
            req.time_budget = iter_mode ? std::numeric_limits<double>::infinity() : remaining;
            req.max_iterations = iterations_left;
            req.rng_seed = seeds.next();
            req.algorithm = config.algorithm;
            req.params = config.params;
            req.cancel = config.cancel;
            PlanResult res = plan(req, scene);
            out.planning_time += res.stats.wall_time;
            out.iterations += res.stats.iterations;
            const bool solved = res.status == PlanStatus::Solved;
            if (solved) {
                out.final_state = res.final_state;
                out.full_controls.insert(out.full_controls.end(), res.controls.begin(), res.controls.end());
            }
            record({*action, solved, res.stats.wall_time, guidance, res.status, std::nullopt});
            strategy.outcome(*action, solved, out.final_state);
            out.status = solved ? GrtcStatus::Success : cancelled() ? GrtcStatus::Aborted : GrtcStatus::OverallTimeout;
            break;
        }

        ActionResult res = executeHighLevelAction(out.final_state, *action, scene, budgets, config, seeds,
                                                  Allowance{remaining, iterations_left});
        out.planning_time += res.plan_time;
        out.iterations += res.iterations;
        if (res.success) {
            out.final_state = std::move(res.state);
            out.full_controls.insert(out.full_controls.end(), res.controls.begin(), res.controls.end());
        }
        record({*action, res.success, res.plan_time, guidance, res.approach_status, res.push_status});
        strategy.outcome(*action, res.success, out.final_state);
    }
    if (out.status == GrtcStatus::OverallTimeout && cancelled())
        out.status = GrtcStatus::Aborted;
    return out;
}

std::string eventLogLine(std::size_t index, const ExecutedAction& e)
{
    nlohmann::json j;
    j["index"] = index;
    j["object"] = e.action.object;
    j["centroid"] = e.action.centroid ? nlohmann::json::array({e.action.centroid->x, e.action.centroid->y})
                                      : nlohmann::json(nullptr);
    j["success"] = e.success;
    j["plan_time"] = e.plan_time;
    j["guidance_time"] = e.guidance_time;
    j["approach"] = planStatusName(e.approach_status);
    j["push"] = e.push_status ? nlohmann::json(planStatusName(*e.push_status)) : nlohmann::json(nullptr);
    return j.dump();
}

} // namespace rtc
