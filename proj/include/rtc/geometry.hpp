#pragma once

// Planar geometry: SE(2) poses, disk/box shapes, contact queries and swept
// corridors. Everything here is a pure function over values.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace rtc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi]. Throws std::domain_error for non-finite input.
double normalizeAngle(double a);

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
/// Counter-clockwise perpendicular.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 rotate(Vec2 v, double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Pose on the plane. The constructor wraps theta into (-pi, pi]; code that
/// writes the fields directly is responsible for keeping theta wrapped.
struct Pose2
{
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalizeAngle(theta_)) {}

    Vec2 position() const { return {x, y}; }
    /// Maps a point from this pose's local frame into the world frame.
    Vec2 transform(Vec2 local) const { return position() + rotate(local, theta); }
    /// Maps a world point into this pose's local frame.
    Vec2 inverseTransform(Vec2 world) const { return rotate(world - position(), -theta); }

    friend bool operator==(const Pose2&, const Pose2&) = default;
};

struct Disk
{
    double radius = 0.0;
    friend bool operator==(const Disk&, const Disk&) = default;
};

struct Box
{
    double half_extent_x = 0.0;
    double half_extent_y = 0.0;
    friend bool operator==(const Box&, const Box&) = default;
};

/// A disk or an oriented box with strictly positive dimensions.
class ConvexShape
{
public:
    ConvexShape(Disk d);
    ConvexShape(Box b);

    bool isDisk() const { return std::holds_alternative<Disk>(shape_); }
    bool isBox() const { return std::holds_alternative<Box>(shape_); }
    const Disk& disk() const { return std::get<Disk>(shape_); }
    const Box& box() const { return std::get<Box>(shape_); }

    /// Distance from the shape center to its farthest point.
    double circumradius() const { return circumradius_; }
    /// Extent from the center along the local +x axis (the "front face").
    double frontExtent() const;

    friend bool operator==(const ConvexShape& a, const ConvexShape& b) { return a.shape_ == b.shape_; }

private:
    std::variant<Disk, Box> shape_;
    double circumradius_ = 0.0;
};

struct Circle
{
    Vec2 center;
    double radius = 0.0;
};

Circle minEnclosingCircle(const ConvexShape& shape, const Pose2& pose);

/// Penetration between two shapes. `normal` is a unit vector pointing from the
/// first shape toward the second; translating the second shape by
/// depth * normal separates them.
struct Contact
{
    double depth = 0.0;
    Vec2 normal;
    Vec2 point;
};

/// Returns a contact iff the interiors intersect (depth > 0).
std::optional<Contact> overlap(const ConvexShape& a, const Pose2& pa, const ConvexShape& b, const Pose2& pb);

inline constexpr double kDefaultRotationWeight = 0.25;

double se2Distance(const Pose2& a, const Pose2& b, double w_rot = kDefaultRotationWeight);

/// Convex polygon, vertices counter-clockwise.
using Polygon = std::vector<Vec2>;

/// Boundary polygon of a posed shape. Disks become the circumscribed regular
/// 16-gon, so the polygon always contains the true shape.
Polygon footprintPolygon(const ConvexShape& shape, const Pose2& pose);

/// Andrew's monotone chain. Collinear points are dropped.
Polygon convexHull(std::vector<Vec2> points);

double polygonArea(std::span<const Vec2> poly);
/// Closed containment: boundary points count as inside (within `tol`).
bool polygonContains(std::span<const Vec2> poly, Vec2 p, double tol = 1e-12);
/// Separating-axis test on two convex polygons. Touching counts as
/// intersecting when `margin` >= 0; a positive margin inflates the test.
bool polygonsIntersect(std::span<const Vec2> a, std::span<const Vec2> b, double margin = 0.0);
/// Exact test of a posed shape against a convex polygon, inflated by `margin`.
bool shapeIntersectsPolygon(const ConvexShape& shape, const Pose2& pose, std::span<const Vec2> poly,
                            double margin = 0.0);
bool shapeContainsPoint(const ConvexShape& shape, const Pose2& pose, Vec2 p);
/// Distance from `p` to the shape boundary; negative inside.
double signedDistance(const ConvexShape& shape, const Pose2& pose, Vec2 p);

struct FootprintSample
{
    ConvexShape shape;
    Pose2 pose;
};

/// Region swept by a shape translated along a straight segment.
struct Corridor
{
    std::vector<FootprintSample> footprint_samples;
    Polygon hull;
};

/// Samples footprints at most `step` apart along start->end (heading held at
/// start.theta) and returns them with the hull of all their vertices.
Corridor sweptCorridor(const ConvexShape& shape, const Pose2& start, const Pose2& end, double step);

struct Rect
{
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool contains(Vec2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

} // namespace rtc
