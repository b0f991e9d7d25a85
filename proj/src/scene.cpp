#include "rtc/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "rtc/dynamics.hpp"
#include "rtc/errors.hpp"
#include "rtc/rng.hpp"

namespace rtc {

std::string_view roleName(Role r)
{
    switch (r) {
    case Role::Robot:
        return "robot";
    case Role::Movable:
        return "movable";
    case Role::GoalObject:
        return "goal";
    case Role::Static:
        return "static";
    }
    return "unknown";
}

double roundSignificant9(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

Scene::Scene(std::vector<BodySpec> bodies, Rect workspace, Rect gripper_pocket, double region_diameter,
             PhysicsParams physics, std::uint64_t seed)
    : robot_(bodies.empty() ? BodySpec{"", Disk{1.0}, Role::Robot, {}} : bodies.front()),
      workspace_(workspace), gripper_pocket_(gripper_pocket), region_diameter_(region_diameter),
      physics_(physics), seed_(seed)
{
    std::set<std::string> ids;
    int robots = 0, goals = 0;
    for (BodySpec& b : bodies) {
        if (b.id.empty())
            throw SceneError("body with empty id");
        if (!ids.insert(b.id).second)
            throw SceneError("duplicate body id '" + b.id + "'");
        switch (b.role) {
        case Role::Robot:
            ++robots;
            robot_ = b;
            break;
        case Role::GoalObject:
            ++goals;
            [[fallthrough]];
        case Role::Movable:
            movables_.push_back(b);
            break;
        case Role::Static:
            statics_.push_back(b);
            break;
        }
    }
    if (robots != 1)
        throw SceneError("scene must contain exactly one robot body (found " + std::to_string(robots) + ")");
    if (goals != 1)
        throw SceneError("scene must contain exactly one goal object (found " + std::to_string(goals) + ")");
    std::sort(movables_.begin(), movables_.end(), [](const BodySpec& a, const BodySpec& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < movables_.size(); ++i)
        if (movables_[i].role == Role::GoalObject)
            goal_index_ = i;

    if (!(workspace_.x_max > workspace_.x_min) || !(workspace_.y_max > workspace_.y_min))
        throw SceneError("workspace rectangle is empty");
    if (!(gripper_pocket_.x_max > gripper_pocket_.x_min) || !(gripper_pocket_.y_max > gripper_pocket_.y_min))
        throw SceneError("gripper pocket rectangle is empty");
    const double front = robot_.shape.frontExtent();
    if (gripper_pocket_.x_min > front + 0.01 || gripper_pocket_.x_max <= front)
        throw SceneError("gripper pocket must start at the robot's front face");
    if (!(region_diameter_ > 0.0))
        throw SceneError("region_diameter must be positive");
    if (!(physics_.dt > 0.0) || !(physics_.tol_pen > 0.0) || !(physics_.v_max > 0.0) ||
        !(physics_.omega_max > 0.0) || !(physics_.d_max > 0.0) || physics_.kappa < 0.0 ||
        physics_.max_projection_iterations < 1)
        throw SceneError("physics parameters must be positive");

    const ValidityReport report = checkValidity(initialConfiguration(), *this);
    if (!report.valid) {
        std::ostringstream msg;
        msg << "initial configuration is invalid:";
        for (const Violation& v : report.violations)
            msg << ' ' << violationName(v.kind) << '(' << v.body << ')';
        throw SceneError(msg.str());
    }
}

std::optional<std::size_t> Scene::movableIndex(std::string_view id) const
{
    for (std::size_t i = 0; i < movables_.size(); ++i)
        if (movables_[i].id == id)
            return i;
    return std::nullopt;
}

std::size_t Scene::requireMovable(std::string_view id) const
{
    if (auto i = movableIndex(id))
        return *i;
    throw ContractError("unknown movable object id '" + std::string(id) + "'");
}

std::vector<BodySpec> Scene::bodies() const
{
    std::vector<BodySpec> out;
    out.reserve(1 + movables_.size() + statics_.size());
    out.push_back(robot_);
    out.insert(out.end(), movables_.begin(), movables_.end());
    out.insert(out.end(), statics_.begin(), statics_.end());
    return out;
}

SystemConfiguration Scene::initialConfiguration() const
{
    SystemConfiguration q;
    q.robot = robot_.initial_pose;
    q.objects.reserve(movables_.size());
    for (const BodySpec& b : movables_)
        q.objects.push_back(b.initial_pose);
    return q;
}

Scene Scene::withPhysics(const PhysicsParams& physics) const
{
    return Scene(bodies(), workspace_, gripper_pocket_, region_diameter_, physics, seed_);
}

Scene Scene::withRegionDiameter(double d) const
{
    return Scene(bodies(), workspace_, gripper_pocket_, d, physics_, seed_);
}

void validateGoal(const GoalSpec& g, const Scene& scene)
{
    if (const auto* set = std::get_if<RobotPoseSet>(&g)) {
        if (set->poses.empty())
            throw ContractError("RobotPoseSet goal has no poses");
        if (!(set->tol_xy > 0.0) || !(set->tol_theta > 0.0))
            throw ContractError("RobotPoseSet tolerances must be positive");
    } else if (const auto* region = std::get_if<ObjectInRegion>(&g)) {
        scene.requireMovable(region->object);
        if (!(region->diameter > 0.0))
            throw ContractError("ObjectInRegion diameter must be positive");
    }
}

bool goalObjectInPocket(const SystemConfiguration& q, const Scene& scene)
{
    const Vec2 local = q.robot.inverseTransform(q.objects[scene.goalIndex()].position());
    return scene.gripperPocket().contains(local);
}

bool goalSatisfied(const SystemConfiguration& q, const GoalSpec& g, const Scene& scene)
{
    struct Visitor
    {
        const SystemConfiguration& q;
        const Scene& scene;

        bool operator()(const ReachGoalObject&) const { return goalObjectInPocket(q, scene); }
        bool operator()(const RobotPoseSet& set) const
        {
            if (set.poses.empty())
                throw ContractError("RobotPoseSet goal has no poses");
            return std::any_of(set.poses.begin(), set.poses.end(), [&](const Pose2& p) {
                return norm(q.robot.position() - p.position()) <= set.tol_xy &&
                       std::abs(normalizeAngle(q.robot.theta - p.theta)) <= set.tol_theta;
            });
        }
        bool operator()(const ObjectInRegion& region) const
        {
            const std::size_t i = scene.requireMovable(region.object);
            return norm(q.objects[i].position() - region.centroid) <= 0.5 * region.diameter;
        }
    };
    return std::visit(Visitor{q, scene}, g);
}

namespace {

ConvexShape sampleObjectShape(Rng& rng)
{
    if (rng.bernoulli(0.5))
        return Disk{roundSignificant9(rng.uniform(0.03, 0.06))};
    const double hx = roundSignificant9(rng.uniform(0.03, 0.07));
    const double hy = roundSignificant9(rng.uniform(0.03, 0.07));
    return Box{hx, hy};
}

bool collidesWithAny(const ConvexShape& shape, const Pose2& pose, const std::vector<BodySpec>& placed)
{
    return std::any_of(placed.begin(), placed.end(),
                       [&](const BodySpec& b) { return overlap(shape, pose, b.shape, b.initial_pose).has_value(); });
}

std::string objectId(int k)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "o%02d", k);
    return buf;
}

} // namespace

Scene generateRandomScene(std::uint64_t seed, int n_movables)
{
    using namespace defaults;
    if (n_movables < 1)
        throw ContractError("generateRandomScene: n_movables must be at least 1");

    Rng rng(seed);
    const double W = kShelfWidth, D = kShelfDepth, t = kWallThickness;
    const auto r9 = roundSignificant9;
    std::vector<BodySpec> placed;
    placed.push_back({"robot", Box{kRobotHalfDepth, kRobotHalfWidth}, Role::Robot,
                      Pose2(r9(0.5 * W), r9(-0.15), r9(kPi / 2))});
    placed.push_back({"wall_back", Box{r9(0.5 * W + t), r9(0.5 * t)}, Role::Static,
                      Pose2(r9(0.5 * W), r9(D + 0.5 * t), 0.0)});
    placed.push_back({"wall_left", Box{r9(0.5 * t), r9(0.5 * (D + t))}, Role::Static,
                      Pose2(r9(-0.5 * t), r9(0.5 * (D + t)), 0.0)});
    placed.push_back({"wall_right", Box{r9(0.5 * t), r9(0.5 * (D + t))}, Role::Static,
                      Pose2(r9(W + 0.5 * t), r9(0.5 * (D + t)), 0.0)});

    constexpr int kMaxAttempts = 10000;
    auto place = [&](const std::string& id, Role role, double y_lo_frac) {
        const ConvexShape shape = sampleObjectShape(rng);
        const double m = shape.circumradius();
        const double y_lo = std::max(y_lo_frac * D, m);
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            const double x = roundSignificant9(rng.uniform(m, W - m));
            const double y = roundSignificant9(rng.uniform(y_lo, D - m));
            const double th = roundSignificant9(rng.uniform(-kPi, kPi));
            const Pose2 pose(x, y, th);
            if (!collidesWithAny(shape, pose, placed)) {
                placed.push_back({id, shape, role, pose});
                return;
            }
        }
        throw SceneError("could not place object '" + id + "' after 10000 attempts (scene too dense)");
    };

    place("goal", Role::GoalObject, 0.8);
    for (int k = 1; k < n_movables; ++k)
        place(objectId(k), Role::Movable, 0.0);

    const Rect workspace{0.0, 0.0, W, D};
    return Scene(std::move(placed), workspace, kGripperPocket, kRegionDiameter, PhysicsParams{}, seed);
}

} // namespace rtc
