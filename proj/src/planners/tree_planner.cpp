#include <algorithm>
#include <cmath>

#include "rtc/errors.hpp"
#include "rtc/planners.hpp"

namespace rtc {

std::string_view algorithmName(Algorithm a)
{
    return a == Algorithm::RRT ? "RRT" : "KPIECE";
}

std::string_view planStatusName(PlanStatus s)
{
    switch (s) {
    case PlanStatus::Solved:
        return "Solved";
    case PlanStatus::TimedOut:
        return "TimedOut";
    case PlanStatus::Infeasible:
        return "Infeasible";
    }
    return "Unknown";
}

bool samePlan(const PlanResult& a, const PlanResult& b)
{
    return a.status == b.status && a.controls == b.controls && a.final_state == b.final_state &&
           a.stats.iterations == b.stats.iterations && a.stats.tree_size == b.stats.tree_size;
}

void validateParams(const PlannerParams& p)
{
    if (!(p.goal_bias >= 0.0 && p.goal_bias <= 1.0))
        throw ContractError("goal_bias must be in [0, 1]");
    if (p.max_controls_per_extend < 1)
        throw ContractError("max_controls_per_extend must be at least 1");
    if (!(p.w_rot >= 0.0))
        throw ContractError("w_rot must be non-negative");
    if (!(p.kpiece_cell_size > 0.0))
        throw ContractError("kpiece_cell_size must be positive");
    if (p.kpiece_interior_threshold < 1 || p.kpiece_interior_threshold > 4)
        throw ContractError("kpiece_interior_threshold must be in [1, 4]");
    if (!(p.kpiece_exterior_bias >= 0.0 && p.kpiece_exterior_bias <= 1.0))
        throw ContractError("kpiece_exterior_bias must be in [0, 1]");
    if (!(p.min_control_duration > 0.0) || p.max_control_duration < p.min_control_duration)
        throw ContractError("control duration range is empty");
}

namespace {

Pose2 clampToWorkspace(const Pose2& p, const Rect& ws)
{
    return Pose2(std::clamp(p.x, ws.x_min, ws.x_max), std::clamp(p.y, ws.y_min, ws.y_max), p.theta);
}

double inscribedRadius(const ConvexShape& s)
{
    return s.isDisk() ? s.disk().radius : std::min(s.box().half_extent_x, s.box().half_extent_y);
}

bool robotClearOfStatics(const Pose2& pose, const Scene& scene)
{
    for (const BodySpec& s : scene.statics()) {
        auto c = overlap(scene.robot().shape, pose, s.shape, s.initial_pose);
        if (c && c->depth > scene.physics().tol_pen)
            return false;
    }
    return true;
}

} // namespace

bool goalStaticallyReachable(const GoalSpec& goal, const SystemConfiguration&, const Scene& scene)
{
    if (const auto* set = std::get_if<RobotPoseSet>(&goal))
        return std::any_of(set->poses.begin(), set->poses.end(),
                           [&](const Pose2& p) { return robotClearOfStatics(p, scene); });
    if (const auto* region = std::get_if<ObjectInRegion>(&goal)) {
        const BodySpec& obj = scene.movables()[scene.requireMovable(region->object)];
        const ConvexShape probe = Disk{inscribedRadius(obj.shape)};
        const double r = 0.5 * region->diameter;
        const double step = std::min(0.005, r / 4.0);
        for (double dx = -r; dx <= r; dx += step) {
            for (double dy = -r; dy <= r; dy += step) {
                if (dx * dx + dy * dy > r * r)
                    continue;
                const Vec2 p = region->centroid + Vec2{dx, dy};
                if (!scene.workspace().contains(p))
                    continue;
                const bool clear = std::none_of(scene.statics().begin(), scene.statics().end(), [&](const BodySpec& s) {
                    auto c = overlap(probe, Pose2(p.x, p.y, 0.0), s.shape, s.initial_pose);
                    return c && c->depth > scene.physics().tol_pen;
                });
                if (clear)
                    return true;
            }
        }
        return false;
    }
    return true;
}

TreePlanner::TreePlanner(PlannerRequest request, const Scene& scene)
    : req_(std::move(request)), scene_(scene), rng_(req_.rng_seed)
{
    validateParams(req_.params);
    validateGoal(req_.goal, scene_);
    if (!(req_.time_budget > 0.0))
        throw ContractError("time_budget must be positive");
    if (req_.start.objects.size() != scene_.movables().size())
        throw ContractError("start configuration does not match the scene");
}

int TreePlanner::addMotion(Motion m)
{
    robot_poses_.push(m.state.robot);
    motions_.push_back(std::move(m));
    const int idx = static_cast<int>(motions_.size()) - 1;
    if (solution_ < 0 && goalSatisfied(motions_.back().state, req_.goal, scene_))
        solution_ = idx;
    return idx;
}

Control TreePlanner::sampleControl()
{
    const PhysicsParams& lim = scene_.physics();
    const double d_hi = std::min(req_.params.max_control_duration, lim.d_max);
    const double d_lo = std::min(req_.params.min_control_duration, d_hi);
    Control u;
    u.vx = rng_.uniform(-lim.v_max, lim.v_max);
    u.vy = rng_.uniform(-lim.v_max, lim.v_max);
    u.omega = rng_.uniform(-lim.omega_max, lim.omega_max);
    u.duration = rng_.uniform(d_lo, d_hi);
    return u;
}

Pose2 TreePlanner::sampleUniformRobotPose()
{
    const Rect& ws = scene_.workspace();
    const double x = rng_.uniform(ws.x_min, ws.x_max);
    const double y = rng_.uniform(ws.y_min, ws.y_max);
    return Pose2(x, y, rng_.uniform(-kPi, kPi));
}

Pose2 TreePlanner::sampleGoalRobotPose()
{
    const Rect& ws = scene_.workspace();
    const Rect& pocket = scene_.gripperPocket();
    const double front = scene_.robot().shape.frontExtent();

    struct Sampler
    {
        TreePlanner& self;
        const Rect& ws;
        const Rect& pocket;
        double front;

        Pose2 operator()(const ReachGoalObject&) const
        {
            // Pocket center on the goal object, heading inward +-30 degrees.
            const Vec2 c = self.req_.start.objects[self.scene_.goalIndex()].position();
            const double heading = self.scene_.inwardHeading() + self.rng_.uniform(-kPi / 6, kPi / 6);
            const Vec2 pocket_center = pocket.center();
            const Vec2 p = c - rotate(pocket_center, heading);
            return clampToWorkspace(Pose2(p.x, p.y, heading), ws);
        }
        Pose2 operator()(const RobotPoseSet& set) const
        {
            return clampToWorkspace(set.poses[self.rng_.below(set.poses.size())], ws);
        }
        Pose2 operator()(const ObjectInRegion& region) const
        {
            // Behind the object, anywhere along its path to the region.
            const std::size_t i = self.scene_.requireMovable(region.object);
            const BodySpec& body = self.scene_.movables()[i];
            const Vec2 c = self.req_.start.objects[i].position();
            const Vec2 delta = region.centroid - c;
            const double len = norm(delta);
            const Vec2 u =
                len > 1e-9 ? (1.0 / len) * delta : rotate({1.0, 0.0}, self.scene_.inwardHeading());
            const double t = self.rng_.uniform01();
            const double standoff = body.shape.circumradius() + front;
            const Vec2 p = c + t * delta - standoff * u;
            const double heading = std::atan2(u.y, u.x) + self.rng_.uniform(-kPi / 12, kPi / 12);
            return clampToWorkspace(Pose2(p.x, p.y, heading), ws);
        }
    };
    return std::visit(Sampler{*this, ws, pocket, front}, req_.goal);
}

PlanResult TreePlanner::extract(PlanStatus status, std::chrono::steady_clock::time_point t0) const
{
    PlanResult r;
    r.status = status;
    r.stats.iterations = iterations_;
    r.stats.tree_size = motions_.size();
    if (status == PlanStatus::Solved) {
        for (int i = solution_; i > 0; i = motions_[i].parent)
            r.controls.push_back(motions_[i].control);
        std::reverse(r.controls.begin(), r.controls.end());
        r.final_state = motions_[solution_].state;
    } else {
        r.final_state = req_.start;
    }
    r.stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

PlanResult TreePlanner::solve()
{
    const auto t0 = std::chrono::steady_clock::now();
    if (!checkValidity(req_.start, scene_, req_.contacts).valid)
        return extract(PlanStatus::Infeasible, t0);
    if (motions_.empty())
        addMotion({req_.start, -1, {}});
    if (solved())
        return extract(PlanStatus::Solved, t0);
    if (!goalStaticallyReachable(req_.goal, req_.start, scene_))
        return extract(PlanStatus::Infeasible, t0);

    for (;;) {
        if (req_.max_iterations > 0 && iterations_ >= req_.max_iterations)
            return extract(PlanStatus::TimedOut, t0);
        if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= req_.time_budget)
            return extract(PlanStatus::TimedOut, t0);
        if (req_.cancel && req_.cancel->load(std::memory_order_relaxed))
            return extract(PlanStatus::TimedOut, t0);
        ++iterations_;
        if (expand())
            return extract(PlanStatus::Solved, t0);
    }
}

RrtPlanner::RrtPlanner(PlannerRequest request, const Scene& scene) : TreePlanner(std::move(request), scene)
{
    addMotion({req_.start, -1, {}});
}

bool RrtPlanner::expand()
{
    const Pose2 target = rng_.bernoulli(req_.params.goal_bias) ? sampleGoalRobotPose() : sampleUniformRobotPose();
    const auto near = simd::nearest(robot_poses_.columns(), target, req_.params.w_rot);
    const SystemConfiguration from = motions_[near.index].state;

    std::optional<Motion> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < req_.params.max_controls_per_extend; ++k) {
        const Control u = sampleControl();
        auto step = propagate(from, u, scene_, req_.contacts);
        if (!step.report.valid)
            continue;
        const double d = se2Distance(step.state.robot, target, req_.params.w_rot);
        if (d < best_d) {
            best_d = d;
            best = Motion{std::move(step.state), static_cast<int>(near.index), u};
        }
    }
    if (best)
        addMotion(std::move(*best));
    return solved();
}

PlanResult planRRT(const PlannerRequest& req, const Scene& scene)
{
    return RrtPlanner(req, scene).solve();
}

PlanResult plan(const PlannerRequest& req, const Scene& scene)
{
    return req.algorithm == Algorithm::RRT ? planRRT(req, scene) : planKPIECE(req, scene);
}

bool validateSolution(const SystemConfiguration& start, std::span<const Control> controls, const GoalSpec& goal,
                      const Scene& scene, const ContactMask& mask)
{
    if (!checkValidity(start, scene, mask).valid)
        return false;
    try {
        const Rollout r = rolloutControls(start, controls, scene, mask);
        return r.report.valid && goalSatisfied(r.trajectory.back(), goal, scene);
    } catch (const ContractError&) {
        return false;
    }
}

} // namespace rtc
