#pragma once

// Problem definitions: bodies, shelf layout, physics parameters, goals, the
// random scene generator and the scene file format.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rtc/geometry.hpp"
#include "rtc/state.hpp"

namespace rtc {

enum class Role
{
    Robot,
    Movable,
    GoalObject,
    Static,
};

std::string_view roleName(Role r);

struct BodySpec
{
    std::string id;
    ConvexShape shape;
    Role role;
    Pose2 initial_pose;

    bool movable() const { return role == Role::Movable || role == Role::GoalObject; }
    friend bool operator==(const BodySpec&, const BodySpec&) = default;
};

struct PhysicsParams
{
    double dt = 0.01;       ///< integration substep (s)
    double tol_pen = 1e-3;  ///< penetration tolerance (m)
    double kappa = 0.5;     ///< box spin gain per projection iteration
    double v_max = 0.2;     ///< m/s, per axis
    double omega_max = 0.5; ///< rad/s
    double d_max = 3.0;     ///< longest control duration (s)
    int max_projection_iterations = 32;

    friend bool operator==(const PhysicsParams&, const PhysicsParams&) = default;
};

/// Shelf-scale defaults shared by the generator and the tests.
namespace defaults {
inline constexpr double kShelfWidth = 1.2;
inline constexpr double kShelfDepth = 0.6;
inline constexpr double kWallThickness = 0.04;
inline constexpr double kRegionDiameter = 0.10;
inline constexpr double kRobotHalfDepth = 0.05;
inline constexpr double kRobotHalfWidth = 0.09;
inline const Rect kGripperPocket{0.05, -0.06, 0.20, 0.06};
} // namespace defaults

/// Immutable problem instance. Construction validates every structural
/// invariant (one robot, one goal object, unique ids, valid initial state)
/// and throws SceneError otherwise.
class Scene
{
public:
    Scene(std::vector<BodySpec> bodies, Rect workspace, Rect gripper_pocket, double region_diameter,
          PhysicsParams physics, std::uint64_t seed);

    const BodySpec& robot() const { return robot_; }
    /// Movable bodies (goal object included) sorted by id.
    std::span<const BodySpec> movables() const { return movables_; }
    std::span<const BodySpec> statics() const { return statics_; }
    std::size_t goalIndex() const { return goal_index_; }
    const BodySpec& goalObject() const { return movables_[goal_index_]; }
    std::optional<std::size_t> movableIndex(std::string_view id) const;
    /// Index into movables(); throws ContractError for unknown ids.
    std::size_t requireMovable(std::string_view id) const;

    /// Robot, then movables, then statics.
    std::vector<BodySpec> bodies() const;

    const Rect& workspace() const { return workspace_; }
    const Rect& gripperPocket() const { return gripper_pocket_; }
    double regionDiameter() const { return region_diameter_; }
    const PhysicsParams& physics() const { return physics_; }
    std::uint64_t seed() const { return seed_; }

    /// Heading that points from the shelf mouth into the shelf (the robot's
    /// initial heading).
    double inwardHeading() const { return robot_.initial_pose.theta; }

    SystemConfiguration initialConfiguration() const;

    Scene withPhysics(const PhysicsParams& physics) const;
    Scene withRegionDiameter(double d) const;

    friend bool operator==(const Scene&, const Scene&) = default;

private:
    BodySpec robot_;
    std::vector<BodySpec> movables_;
    std::vector<BodySpec> statics_;
    std::size_t goal_index_ = 0;
    Rect workspace_;
    Rect gripper_pocket_;
    double region_diameter_ = defaults::kRegionDiameter;
    PhysicsParams physics_;
    std::uint64_t seed_ = 0;
};

struct ReachGoalObject
{
    friend bool operator==(const ReachGoalObject&, const ReachGoalObject&) = default;
};

struct RobotPoseSet
{
    std::vector<Pose2> poses;
    double tol_xy = 0.03;
    double tol_theta = 0.35;
    friend bool operator==(const RobotPoseSet&, const RobotPoseSet&) = default;
};

struct ObjectInRegion
{
    std::string object;
    Vec2 centroid;
    double diameter = defaults::kRegionDiameter;
    friend bool operator==(const ObjectInRegion&, const ObjectInRegion&) = default;
};

using GoalSpec = std::variant<ReachGoalObject, RobotPoseSet, ObjectInRegion>;

/// Throws ContractError for an empty pose set, non-positive sizes or an
/// unknown object id.
void validateGoal(const GoalSpec& g, const Scene& scene);

bool goalSatisfied(const SystemConfiguration& q, const GoalSpec& g, const Scene& scene);

/// True iff the goal object's center is inside the robot's gripper pocket.
bool goalObjectInPocket(const SystemConfiguration& q, const Scene& scene);

/// Shelf with three walls and an open front. The workspace is the shelf
/// interior, so an object pushed out of the mouth is out of bounds; the robot
/// starts outside the mouth facing in. The goal object sits in the rear band and the remaining
/// objects placed by rejection sampling. Deterministic in (seed, n_movables).
/// Throws SceneError when an object cannot be placed in 10^4 attempts.
Scene generateRandomScene(std::uint64_t seed, int n_movables);

/// Scene document (JSON, schema in docs/scene.schema.json). Numbers are
/// written with 9 significant digits.
std::string serializeScene(const Scene& s);
/// Throws ParseError with line (syntax) or field path (structure).
Scene parseScene(std::string_view text);

Scene loadSceneFile(const std::string& path);
void saveSceneFile(const Scene& s, const std::string& path);

/// Rounds to 9 significant digits, the precision of the scene format.
double roundSignificant9(double v);

} // namespace rtc
