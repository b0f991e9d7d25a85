#pragma once

// Quasi-static pushing propagator. The robot is kinematic; movables only move
// when something overlaps them, and are then projected out along contact
// normals (position-based, Gauss-Seidel order). Statics never move.

#include <string>
#include <string_view>
#include <vector>

#include "rtc/scene.hpp"
#include "rtc/state.hpp"

namespace rtc {

struct Control
{
    double vx = 0.0;       ///< m/s, world frame
    double vy = 0.0;       ///< m/s, world frame
    double omega = 0.0;    ///< rad/s
    double duration = 0.0; ///< s

    friend bool operator==(const Control&, const Control&) = default;
};

/// Throws ContractError if `u` exceeds the scene's limits.
void checkControlLimits(const Control& u, const PhysicsParams& limits);

enum class ViolationKind
{
    RobotHitsStatic,
    ObjectOutOfBounds,
    UnresolvedPenetration,
};

std::string_view violationName(ViolationKind k);

struct Violation
{
    ViolationKind kind;
    std::string body;
    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidityReport
{
    bool valid = true;
    std::vector<Violation> violations;

    void add(ViolationKind kind, std::string body)
    {
        valid = false;
        violations.push_back({kind, std::move(body)});
    }
    friend bool operator==(const ValidityReport&, const ValidityReport&) = default;
};

/// Which body pairs interact. Disabling robot/movable and movable/movable
/// contacts lets the robot pass through objects (used by backward planning).
struct ContactMask
{
    bool robot_movable = true;
    bool movable_movable = true;
    friend bool operator==(const ContactMask&, const ContactMask&) = default;
};

struct PropagateResult
{
    SystemConfiguration state;
    ValidityReport report;
};

/// Advances `q` under `u` at the scene's fixed substep. Stops at the first
/// substep that ends in an invalid state and returns that state.
PropagateResult propagate(const SystemConfiguration& q, const Control& u, const Scene& scene,
                          const ContactMask& mask = {});

ValidityReport checkValidity(const SystemConfiguration& q, const Scene& scene, const ContactMask& mask = {});

/// Largest pairwise penetration among interacting pairs (0 when separated).
double maxPenetration(const SystemConfiguration& q, const Scene& scene, const ContactMask& mask = {});

struct Rollout
{
    std::vector<SystemConfiguration> trajectory; ///< q0 followed by each post-control state
    ValidityReport report;                       ///< first failure, if any
};

Rollout rolloutControls(const SystemConfiguration& q0, std::span<const Control> controls, const Scene& scene,
                        const ContactMask& mask = {});

} // namespace rtc
