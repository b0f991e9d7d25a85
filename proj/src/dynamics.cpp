#include "rtc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rtc/errors.hpp"

namespace rtc {

namespace {

// Overlaps at or below this depth are treated as touching and left alone.
constexpr double kResolveSlop = 1e-9;

bool mayOverlap(const ConvexShape& a, const Pose2& pa, const ConvexShape& b, const Pose2& pb)
{
    const double dx = pa.x - pb.x, dy = pa.y - pb.y;
    const double r = a.circumradius() + b.circumradius();
    return dx * dx + dy * dy < r * r;
}

std::optional<Contact> contactBetween(const ConvexShape& a, const Pose2& pa, const ConvexShape& b, const Pose2& pb)
{
    if (!mayOverlap(a, pa, b, pb))
        return std::nullopt;
    return overlap(a, pa, b, pb);
}

// Translates movable `pose` by amount * dir; boxes also spin when the contact
// point has a lever arm perpendicular to the push.
void displace(Pose2& pose, const ConvexShape& shape, Vec2 dir, double amount, Vec2 contact_point, double kappa)
{
    double theta = pose.theta;
    if (shape.isBox() && kappa != 0.0) {
        const double R = shape.circumradius();
        const double lever = cross(contact_point - pose.position(), dir);
        theta += kappa * (lever / R) * (amount / R);
    }
    pose = Pose2(pose.x + amount * dir.x, pose.y + amount * dir.y, theta);
}

class Resolver
{
public:
    Resolver(const Scene& scene, const ContactMask& mask) : scene_(scene), mask_(mask) {}

    // One substep's projection. `active` marks movables that may be moved:
    // a movable becomes active once something pushes it.
    void resolve(SystemConfiguration& q, std::vector<char>& active, bool robot_active) const
    {
        const auto movables = scene_.movables();
        const auto statics = scene_.statics();
        const ConvexShape& robot_shape = scene_.robot().shape;
        const double kappa = scene_.physics().kappa;
        const std::size_t n = movables.size();

        for (int iter = 0; iter < scene_.physics().max_projection_iterations; ++iter) {
            bool moved = false;
            if (robot_active && mask_.robot_movable) {
                for (std::size_t i = 0; i < n; ++i) {
                    auto c = contactBetween(robot_shape, q.robot, movables[i].shape, q.objects[i]);
                    if (c && c->depth > kResolveSlop) {
                        displace(q.objects[i], movables[i].shape, c->normal, c->depth, c->point, kappa);
                        active[i] = 1;
                        moved = true;
                    }
                }
            }
            if (mask_.movable_movable) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        if (!active[i] && !active[j])
                            continue;
                        auto c = contactBetween(movables[i].shape, q.objects[i], movables[j].shape, q.objects[j]);
                        if (c && c->depth > kResolveSlop) {
                            const double half = 0.5 * c->depth;
                            displace(q.objects[i], movables[i].shape, -c->normal, half, c->point, kappa);
                            displace(q.objects[j], movables[j].shape, c->normal, half, c->point, kappa);
                            active[i] = active[j] = 1;
                            moved = true;
                        }
                    }
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!active[i])
                    continue;
                for (const BodySpec& s : statics) {
                    auto c = contactBetween(movables[i].shape, q.objects[i], s.shape, s.initial_pose);
                    if (c && c->depth > kResolveSlop) {
                        displace(q.objects[i], movables[i].shape, -c->normal, c->depth, c->point, kappa);
                        moved = true;
                    }
                }
            }
            if (!moved)
                return;
        }
    }

private:
    const Scene& scene_;
    ContactMask mask_;
};

} // namespace

std::string_view violationName(ViolationKind k)
{
    switch (k) {
    case ViolationKind::RobotHitsStatic:
        return "RobotHitsStatic";
    case ViolationKind::ObjectOutOfBounds:
        return "ObjectOutOfBounds";
    case ViolationKind::UnresolvedPenetration:
        return "UnresolvedPenetration";
    }
    return "Unknown";
}

void checkControlLimits(const Control& u, const PhysicsParams& limits)
{
    const bool ok = std::isfinite(u.vx) && std::isfinite(u.vy) && std::isfinite(u.omega) &&
                    std::isfinite(u.duration) && std::abs(u.vx) <= limits.v_max &&
                    std::abs(u.vy) <= limits.v_max && std::abs(u.omega) <= limits.omega_max && u.duration > 0.0 &&
                    u.duration <= limits.d_max;
    if (!ok) {
        std::ostringstream msg;
        msg << "control (" << u.vx << ", " << u.vy << ", " << u.omega << ", " << u.duration
            << ") outside limits v_max=" << limits.v_max << " omega_max=" << limits.omega_max
            << " d_max=" << limits.d_max;
        throw ContractError(msg.str());
    }
}

ValidityReport checkValidity(const SystemConfiguration& q, const Scene& scene, const ContactMask& mask)
{
    ValidityReport report;
    const auto movables = scene.movables();
    const auto statics = scene.statics();
    const double tol = scene.physics().tol_pen;
    const BodySpec& robot = scene.robot();

    auto deeper = [tol](const std::optional<Contact>& c) { return c && c->depth > tol; };

    for (const BodySpec& s : statics) {
        if (deeper(contactBetween(robot.shape, q.robot, s.shape, s.initial_pose))) {
            report.add(ViolationKind::RobotHitsStatic, robot.id);
            break;
        }
    }
    for (std::size_t i = 0; i < movables.size(); ++i) {
        if (!scene.workspace().contains(q.objects[i].position()))
            report.add(ViolationKind::ObjectOutOfBounds, movables[i].id);
    }
    std::vector<char> flagged(movables.size(), 0);
    auto flag = [&](std::size_t i) {
        if (!flagged[i]) {
            flagged[i] = 1;
            report.add(ViolationKind::UnresolvedPenetration, movables[i].id);
        }
    };
    for (std::size_t i = 0; i < movables.size(); ++i) {
        if (mask.robot_movable && deeper(contactBetween(robot.shape, q.robot, movables[i].shape, q.objects[i])))
            flag(i);
        if (mask.movable_movable) {
            for (std::size_t j = i + 1; j < movables.size(); ++j) {
                if (deeper(contactBetween(movables[i].shape, q.objects[i], movables[j].shape, q.objects[j]))) {
                    flag(i);
                    flag(j);
                }
            }
        }
        for (const BodySpec& s : statics) {
            if (deeper(contactBetween(movables[i].shape, q.objects[i], s.shape, s.initial_pose)))
                flag(i);
        }
    }
    return report;
}

double maxPenetration(const SystemConfiguration& q, const Scene& scene, const ContactMask& mask)
{
    const auto movables = scene.movables();
    const auto statics = scene.statics();
    const BodySpec& robot = scene.robot();
    double worst = 0.0;
    auto take = [&worst](const std::optional<Contact>& c) {
        if (c)
            worst = std::max(worst, c->depth);
    };
    for (const BodySpec& s : statics)
        take(contactBetween(robot.shape, q.robot, s.shape, s.initial_pose));
    for (std::size_t i = 0; i < movables.size(); ++i) {
        if (mask.robot_movable)
            take(contactBetween(robot.shape, q.robot, movables[i].shape, q.objects[i]));
        if (mask.movable_movable)
            for (std::size_t j = i + 1; j < movables.size(); ++j)
                take(contactBetween(movables[i].shape, q.objects[i], movables[j].shape, q.objects[j]));
        for (const BodySpec& s : statics)
            take(contactBetween(movables[i].shape, q.objects[i], s.shape, s.initial_pose));
    }
    return worst;
}

PropagateResult propagate(const SystemConfiguration& q, const Control& u, const Scene& scene, const ContactMask& mask)
{
    const PhysicsParams& phys = scene.physics();
    checkControlLimits(u, phys);
    if (q.objects.size() != scene.movables().size())
        throw ContractError("propagate: configuration does not match the scene's movable set");

    PropagateResult out{q, {}};
    const bool robot_moves = u.vx != 0.0 || u.vy != 0.0 || u.omega != 0.0;
    if (!robot_moves) {
        out.report = checkValidity(q, scene, mask);
        return out;
    }

    const int steps = std::max(1, static_cast<int>(std::ceil(u.duration / phys.dt - 1e-9)));
    const Resolver resolver(scene, mask);
    std::vector<char> active(q.objects.size(), 0);
    SystemConfiguration& s = out.state;
    for (int k = 0; k < steps; ++k) {
        const double h = (k + 1 < steps) ? phys.dt : u.duration - (steps - 1) * phys.dt;
        s.robot = Pose2(s.robot.x + u.vx * h, s.robot.y + u.vy * h, s.robot.theta + u.omega * h);
        resolver.resolve(s, active, true);
        out.report = checkValidity(s, scene, mask);
        if (!out.report.valid)
            break;
    }
    return out;
}

Rollout rolloutControls(const SystemConfiguration& q0, std::span<const Control> controls, const Scene& scene,
                        const ContactMask& mask)
{
    Rollout r;
    r.trajectory.push_back(q0);
    for (const Control& u : controls) {
        auto step = propagate(r.trajectory.back(), u, scene, mask);
        r.trajectory.push_back(std::move(step.state));
        if (!step.report.valid) {
            r.report = std::move(step.report);
            break;
        }
    }
    return r;
}

} // namespace rtc
