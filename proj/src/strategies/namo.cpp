#include <algorithm>
#include <cmath>

#include "rtc/strategies.hpp"

namespace rtc {

// Backward planning among movable obstacles. The robot first plans to the
// goal object as if every movable were a ghost. Movables in its swept volume
// must be cleared; each is given a placement outside everything swept so far
// and a push is planned for it alone, which sweeps more volume and may
// uncover further obstacles. Pushes execute in reverse discovery order.

std::string_view namoStatusName(NamoStatus s)
{
    switch (s) {
    case NamoStatus::Plan:
        return "Plan";
    case NamoStatus::PlacementExhausted:
        return "PlacementExhausted";
    case NamoStatus::PlanningFailed:
        return "PlanningFailed";
    }
    return "Unknown";
}

std::vector<Polygon> robotSweptVolume(const Pose2& start, std::span<const Control> controls, const ConvexShape& robot,
                                      double step)
{
    std::vector<Polygon> out;
    Pose2 p = start;
    out.push_back(footprintPolygon(robot, p));
    for (const Control& u : controls) {
        const double dist = std::hypot(u.vx, u.vy) * u.duration;
        const double turn = std::abs(u.omega) * u.duration;
        const int pieces = std::max(1, static_cast<int>(std::ceil(std::max(dist / step, turn / 0.05))));
        const double h = u.duration / pieces;
        for (int k = 0; k < pieces; ++k) {
            const Pose2 nxt(p.x + u.vx * h, p.y + u.vy * h, p.theta + u.omega * h);
            std::vector<Vec2> pts = footprintPolygon(robot, p);
            const Polygon b = footprintPolygon(robot, nxt);
            pts.insert(pts.end(), b.begin(), b.end());
            out.push_back(convexHull(std::move(pts)));
            p = nxt;
        }
    }
    return out;
}

bool intersectsAny(const ConvexShape& shape, const Pose2& pose, std::span<const Polygon> volume, double margin)
{
    const double r = shape.circumradius() + margin;
    for (const Polygon& poly : volume) {
        // Cheap reject on the polygon's bounding box.
        double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
        for (Vec2 v : poly) {
            x0 = std::min(x0, v.x);
            x1 = std::max(x1, v.x);
            y0 = std::min(y0, v.y);
            y1 = std::max(y1, v.y);
        }
        if (pose.x + r < x0 || pose.x - r > x1 || pose.y + r < y0 || pose.y - r > y1)
            continue;
        if (shapeIntersectsPolygon(shape, pose, poly, margin))
            return true;
    }
    return false;
}

namespace {

// Scene with the robot, the goal object, one movable and the statics. The
// robot plans through everything else.
Scene isolate(const Scene& scene, const SystemConfiguration& q, std::size_t index)
{
    std::vector<BodySpec> bodies;
    BodySpec robot = scene.robot();
    robot.initial_pose = q.robot;
    bodies.push_back(robot);
    const auto movables = scene.movables();
    for (std::size_t i = 0; i < movables.size(); ++i) {
        if (i != index && i != scene.goalIndex())
            continue;
        BodySpec b = movables[i];
        b.initial_pose = q.objects[i];
        bodies.push_back(b);
    }
    for (const BodySpec& s : scene.statics())
        bodies.push_back(s);
    return Scene(std::move(bodies), scene.workspace(), scene.gripperPocket(), scene.regionDiameter(),
                 scene.physics(), scene.seed());
}

PlannerRequest makeRequest(const SystemConfiguration& start, GoalSpec goal, const PlannerConfig& cfg,
                           const NamoParams& params, std::uint64_t seed)
{
    PlannerRequest req;
    req.start = start;
    req.goal = std::move(goal);
    req.algorithm = cfg.algorithm;
    req.params = cfg.params;
    req.rng_seed = seed;
    req.cancel = cfg.cancel;
    if (params.plan_iterations > 0)
        req.max_iterations = params.plan_iterations;
    else
        req.time_budget = params.plan_seconds;
    return req;
}

// Footprints of the pushed object along a rollout.
void appendObjectPath(std::vector<Polygon>& volume, const ConvexShape& shape, const std::vector<SystemConfiguration>& traj,
                      std::size_t index)
{
    for (std::size_t k = 1; k < traj.size(); ++k) {
        std::vector<Vec2> pts = footprintPolygon(shape, traj[k - 1].objects[index]);
        const Polygon b = footprintPolygon(shape, traj[k].objects[index]);
        pts.insert(pts.end(), b.begin(), b.end());
        volume.push_back(convexHull(std::move(pts)));
    }
}

} // namespace

NamoResult namoNext(const SystemConfiguration& q, const Scene& scene, const PlannerConfig& planner, Rng& rng,
                    const NamoParams& params)
{
    NamoResult out;
    const auto movables = scene.movables();
    const ContactMask ghost{false, false};

    // Phase A: reach the goal object through all movables.
    PlannerRequest reach = makeRequest(q, ReachGoalObject{}, planner, params, rng.next());
    reach.contacts = ghost;
    const PlanResult path = plan(reach, scene);
    if (path.status != PlanStatus::Solved)
        return out;
    out.reach_corridor = robotSweptVolume(q.robot, path.controls, scene.robot().shape);
    out.swept = out.reach_corridor;

    struct Pending
    {
        std::size_t index;
        std::size_t depth;
    };
    std::deque<Pending> queue;
    std::vector<char> seen(movables.size(), 0);
    seen[scene.goalIndex()] = 1;
    auto enqueueHits = [&](std::size_t depth) {
        for (std::size_t i = 0; i < movables.size(); ++i) {
            if (seen[i] || !intersectsAny(movables[i].shape, q.objects[i], out.swept, params.margin))
                continue;
            seen[i] = 1;
            queue.push_back({i, depth});
        }
    };
    enqueueHits(1);

    // Placements already chosen act as obstacles for later ones.
    SystemConfiguration planned = q;
    std::vector<HighLevelAction> discovered;
    while (!queue.empty()) {
        const Pending item = queue.front();
        queue.pop_front();
        const BodySpec& body = movables[item.index];
        if (item.depth > movables.size()) {
            out.status = NamoStatus::PlacementExhausted;
            out.failed_object = body.id;
            return out;
        }

        // Sample placements until one is free of everything swept so far and
        // a push to it can be planned with the object alone. A free spot the
        // object cannot be pushed to is as useless as an occupied one.
        const Scene solo = isolate(scene, q, item.index);
        const SystemConfiguration solo_start = solo.initialConfiguration();
        const std::size_t solo_index = solo.requireMovable(body.id);
        const Rect& ws = scene.workspace();
        // The push only lands the object within d/2 of the target and may
        // turn it, so keep its circumscribed disk that far from the volume.
        const ConvexShape keep_out_disk = Disk{body.shape.circumradius()};
        const double keep_out_margin = 0.5 * scene.regionDiameter() + params.margin;
        std::optional<Vec2> target;
        PlanResult to_approach, push;
        out.rejected_blocked = out.rejected_unplannable = 0;
        for (int k = 0; k < params.placement_samples && !target &&
                        out.rejected_unplannable < params.plan_attempts;
             ++k) {
            const Vec2 p{rng.uniform(ws.x_min, ws.x_max), rng.uniform(ws.y_min, ws.y_max)};
            if (norm(p - q.objects[item.index].position()) <= 1e-6 || !placementValid(planned, scene, item.index, p, {}) ||
                intersectsAny(keep_out_disk, Pose2(p.x, p.y, 0.0), out.swept, keep_out_margin)) {
                ++out.rejected_blocked;
                continue;
            }
            const ApproachingStates approach = computeApproachingStates(solo_start, body.id, p, solo);
            to_approach = plan(makeRequest(solo_start,
                                           RobotPoseSet{{approach.side, approach.forward}, kApproachTolXY,
                                                        kApproachTolTheta},
                                           planner, params, rng.next()),
                               solo);
            if (to_approach.status == PlanStatus::Solved)
                push = plan(makeRequest(to_approach.final_state, ObjectInRegion{body.id, p, scene.regionDiameter()},
                                        planner, params, rng.next()),
                            solo);
            if (to_approach.status == PlanStatus::Solved && push.status == PlanStatus::Solved)
                target = p;
            else
                ++out.rejected_unplannable;
        }
        if (!target) {
            out.status = NamoStatus::PlacementExhausted;
            out.failed_object = body.id;
            return out;
        }

        std::vector<Control> controls = to_approach.controls;
        controls.insert(controls.end(), push.controls.begin(), push.controls.end());
        const auto robot_volume = robotSweptVolume(q.robot, controls, scene.robot().shape);
        out.swept.insert(out.swept.end(), robot_volume.begin(), robot_volume.end());
        appendObjectPath(out.swept, body.shape, rolloutControls(solo_start, controls, solo).trajectory, solo_index);

        planned.objects[item.index] = Pose2(target->x, target->y, q.objects[item.index].theta);
        discovered.push_back({body.id, *target});
        enqueueHits(item.depth + 1);
    }

    out.status = NamoStatus::Plan;
    out.actions.assign(discovered.rbegin(), discovered.rend());
    out.actions.push_back(goalAction(scene));
    return out;
}

std::optional<HighLevelAction> NamoStrategy::next(const SystemConfiguration& q, const StrategyContext& ctx)
{
    if (queue_.empty()) {
        last_ = namoNext(q, ctx.scene, planner_, rng_, params_);
        if (last_->status != NamoStatus::Plan)
            return std::nullopt;
        queue_.assign(last_->actions.begin(), last_->actions.end());
    }
    HighLevelAction a = queue_.front();
    queue_.pop_front();
    return a;
}

void NamoStrategy::outcome(const HighLevelAction&, bool success, const SystemConfiguration&)
{
    // A failed push invalidates the rest of the ordering; replan from the
    // current state next time.
    if (!success)
        queue_.clear();
}

} // namespace rtc
