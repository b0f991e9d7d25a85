#include "rtc/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace rtc {

double normalizeAngle(double a)
{
    if (!std::isfinite(a))
        throw std::domain_error("normalizeAngle: non-finite angle");
    // remainder() is exact and lands in [-pi, pi]; fold -pi onto +pi.
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi)
        r += kTwoPi;
    return r;
}

ConvexShape::ConvexShape(Disk d) : shape_(d), circumradius_(d.radius)
{
    if (!(d.radius > 0.0) || !std::isfinite(d.radius))
        throw std::invalid_argument("Disk radius must be positive");
}

ConvexShape::ConvexShape(Box b) : shape_(b), circumradius_(std::hypot(b.half_extent_x, b.half_extent_y))
{
    if (!(b.half_extent_x > 0.0) || !(b.half_extent_y > 0.0) || !std::isfinite(circumradius_))
        throw std::invalid_argument("Box half extents must be positive");
}

double ConvexShape::frontExtent() const
{
    return isDisk() ? disk().radius : box().half_extent_x;
}

Circle minEnclosingCircle(const ConvexShape& shape, const Pose2& pose)
{
    // Both shapes are centrally symmetric, so the MEC is centered on the pose.
    return {pose.position(), shape.circumradius()};
}

namespace {

std::optional<Contact> diskDisk(double ra, Vec2 ca, double rb, Vec2 cb)
{
    const Vec2 d = cb - ca;
    const double dist = norm(d);
    const double depth = ra + rb - dist;
    if (!(depth > 0.0))
        return std::nullopt;
    const Vec2 n = dist > 0.0 ? (1.0 / dist) * d : Vec2{1.0, 0.0};
    return Contact{depth, n, ca + (ra - 0.5 * depth) * n};
}

// Box (first) against disk (second); normal points from the box to the disk.
std::optional<Contact> boxDisk(const Box& box, const Pose2& pb, double r, Vec2 c)
{
    const Vec2 local = pb.inverseTransform(c);
    const double hx = box.half_extent_x, hy = box.half_extent_y;
    const Vec2 closest{std::clamp(local.x, -hx, hx), std::clamp(local.y, -hy, hy)};

    Vec2 n_local;
    Vec2 p_local;
    double depth = 0.0;
    if (closest.x != local.x || closest.y != local.y) {
        const Vec2 diff = local - closest;
        const double dist = norm(diff);
        depth = r - dist;
        if (!(depth > 0.0))
            return std::nullopt;
        n_local = (1.0 / dist) * diff;
        p_local = closest;
    } else {
        // Center inside the box: exit through the nearest face, ties to x.
        const double px = hx - std::abs(local.x);
        const double py = hy - std::abs(local.y);
        if (px <= py) {
            const double s = local.x < 0.0 ? -1.0 : 1.0;
            n_local = {s, 0.0};
            p_local = {s * hx, local.y};
            depth = px + r;
        } else {
            const double s = local.y < 0.0 ? -1.0 : 1.0;
            n_local = {0.0, s};
            p_local = {local.x, s * hy};
            depth = py + r;
        }
    }
    return Contact{depth, rotate(n_local, pb.theta), pb.transform(p_local)};
}

std::array<Vec2, 4> boxVertices(const Box& b, const Pose2& p)
{
    const double hx = b.half_extent_x, hy = b.half_extent_y;
    return {p.transform({hx, -hy}), p.transform({hx, hy}), p.transform({-hx, hy}), p.transform({-hx, -hy})};
}

double projectedRadius(const Box& b, const Pose2& p, Vec2 axis)
{
    const Vec2 ux = rotate({1.0, 0.0}, p.theta);
    return b.half_extent_x * std::abs(dot(ux, axis)) + b.half_extent_y * std::abs(dot(perp(ux), axis));
}

// Orders undirected axes by the angle of their representative in [0, pi).
// Used only to break exact SAT ties independently of argument order.
double undirectedAngle(Vec2 axis)
{
    double a = std::atan2(axis.y, axis.x);
    if (a < 0.0)
        a += kPi;
    if (a >= kPi)
        a -= kPi;
    return a;
}

std::optional<Contact> boxBox(const Box& a, const Pose2& pa, const Box& b, const Pose2& pb)
{
    const Vec2 ax = rotate({1.0, 0.0}, pa.theta);
    const Vec2 bx = rotate({1.0, 0.0}, pb.theta);
    const std::array<Vec2, 4> axes{ax, perp(ax), bx, perp(bx)};
    const Vec2 d = pb.position() - pa.position();

    int best = -1;
    double best_overlap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const Vec2 n = axes[i];
        const double ov = projectedRadius(a, pa, n) + projectedRadius(b, pb, n) - std::abs(dot(d, n));
        if (!(ov > 0.0))
            return std::nullopt;
        if (ov < best_overlap || (ov == best_overlap && undirectedAngle(n) < undirectedAngle(axes[best]))) {
            best_overlap = ov;
            best = i;
        }
    }

    Vec2 n = axes[best];
    if (dot(d, n) < 0.0)
        n = -n;

    // Contact point: support feature of the incident box, clipped to the
    // reference face's lateral extent.
    const bool ref_is_a = best < 2;
    const Box& inc_box = ref_is_a ? b : a;
    const Pose2& inc_pose = ref_is_a ? pb : pa;
    const Box& ref_box = ref_is_a ? a : b;
    const Pose2& ref_pose = ref_is_a ? pa : pb;
    const Vec2 dir = ref_is_a ? -n : n; // incident support direction
    const auto verts = boxVertices(inc_box, inc_pose);
    double best_proj = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : verts)
        best_proj = std::max(best_proj, dot(v, dir));
    const Vec2 t = perp(n);
    const double ref_center_t = dot(ref_pose.position(), t);
    const double ref_extent_t = projectedRadius(ref_box, ref_pose, t);
    Vec2 acc;
    int count = 0;
    for (const Vec2& v : verts) {
        if (dot(v, dir) >= best_proj - 1e-9) {
            const double vt = dot(v, t);
            const double clipped = std::clamp(vt, ref_center_t - ref_extent_t, ref_center_t + ref_extent_t);
            acc = acc + (v + (clipped - vt) * t);
            ++count;
        }
    }
    return Contact{best_overlap, n, (1.0 / count) * acc};
}

} // namespace

std::optional<Contact> overlap(const ConvexShape& a, const Pose2& pa, const ConvexShape& b, const Pose2& pb)
{
    if (a.isDisk() && b.isDisk())
        return diskDisk(a.disk().radius, pa.position(), b.disk().radius, pb.position());
    if (a.isBox() && b.isDisk())
        return boxDisk(a.box(), pa, b.disk().radius, pb.position());
    if (a.isDisk() && b.isBox()) {
        auto c = boxDisk(b.box(), pb, a.disk().radius, pa.position());
        if (c)
            c->normal = -c->normal;
        return c;
    }
    return boxBox(a.box(), pa, b.box(), pb);
}

double se2Distance(const Pose2& a, const Pose2& b, double w_rot)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy) + w_rot * std::abs(normalizeAngle(a.theta - b.theta));
}

Polygon footprintPolygon(const ConvexShape& shape, const Pose2& pose)
{
    if (shape.isBox()) {
        const auto v = boxVertices(shape.box(), pose);
        return {v.begin(), v.end()};
    }
    constexpr int kSides = 16;
    // Circumscribed: apothem equals the radius, edges centered on k * 22.5 deg.
    const double vr = shape.disk().radius / std::cos(kPi / kSides);
    Polygon poly;
    poly.reserve(kSides);
    for (int k = 0; k < kSides; ++k) {
        const double ang = (k + 0.5) * kTwoPi / kSides;
        poly.push_back(pose.position() + Vec2{vr * std::cos(ang), vr * std::sin(ang)});
    }
    return poly;
}

Polygon convexHull(std::vector<Vec2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        const Vec2& p = pts[i];
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0)
            --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

double polygonArea(std::span<const Vec2> poly)
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

bool polygonContains(std::span<const Vec2> poly, Vec2 p, double tol)
{
    if (poly.size() < 3)
        return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const Vec2 e = b - a;
        const double len = norm(e);
        if (len == 0.0)
            continue;
        if (cross(e, p - a) / len < -tol)
            return false;
    }
    return true;
}

namespace {

void projectPolygon(std::span<const Vec2> poly, Vec2 axis, double& lo, double& hi)
{
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (const Vec2& v : poly) {
        const double p = dot(v, axis);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
}

bool separatedOnEdges(std::span<const Vec2> a, std::span<const Vec2> b, double margin)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec2 e = a[(i + 1) % a.size()] - a[i];
        const double len = norm(e);
        if (len == 0.0)
            continue;
        const Vec2 axis = (1.0 / len) * perp(e);
        double alo, ahi, blo, bhi;
        projectPolygon(a, axis, alo, ahi);
        projectPolygon(b, axis, blo, bhi);
        if (blo > ahi + margin || alo > bhi + margin)
            return true;
    }
    return false;
}

} // namespace

bool polygonsIntersect(std::span<const Vec2> a, std::span<const Vec2> b, double margin)
{
    if (a.empty() || b.empty())
        return false;
    return !separatedOnEdges(a, b, margin) && !separatedOnEdges(b, a, margin);
}

bool shapeIntersectsPolygon(const ConvexShape& shape, const Pose2& pose, std::span<const Vec2> poly,
                            double margin)
{
    if (shape.isBox())
        return polygonsIntersect(footprintPolygon(shape, pose), poly, margin);
    // Disk: distance from the center to the polygon against the radius.
    const Vec2 c = pose.position();
    const double r = shape.disk().radius + margin;
    if (polygonContains(poly, c))
        return true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const Vec2 e = b - a;
        const double ee = dot(e, e);
        const double t = ee > 0.0 ? std::clamp(dot(c - a, e) / ee, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(c - (a + t * e)));
    }
    return best <= r;
}

bool shapeContainsPoint(const ConvexShape& shape, const Pose2& pose, Vec2 p)
{
    const Vec2 local = pose.inverseTransform(p);
    if (shape.isDisk())
        return dot(local, local) <= shape.disk().radius * shape.disk().radius;
    return std::abs(local.x) <= shape.box().half_extent_x && std::abs(local.y) <= shape.box().half_extent_y;
}

double signedDistance(const ConvexShape& shape, const Pose2& pose, Vec2 p)
{
    const Vec2 local = pose.inverseTransform(p);
    if (shape.isDisk())
        return norm(local) - shape.disk().radius;
    const Vec2 d{std::abs(local.x) - shape.box().half_extent_x, std::abs(local.y) - shape.box().half_extent_y};
    const Vec2 outside{std::max(d.x, 0.0), std::max(d.y, 0.0)};
    return norm(outside) + std::min(std::max(d.x, d.y), 0.0);
}

Corridor sweptCorridor(const ConvexShape& shape, const Pose2& start, const Pose2& end, double step)
{
    if (!(step > 0.0))
        throw std::invalid_argument("sweptCorridor: step must be positive");
    const Vec2 delta = end.position() - start.position();
    const double length = norm(delta);
    const int n = std::max(1, static_cast<int>(std::ceil(length / step)));

    Corridor corridor;
    corridor.footprint_samples.reserve(n + 1);
    std::vector<Vec2> pts;
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const Pose2 p(start.x + s * delta.x, start.y + s * delta.y, start.theta);
        corridor.footprint_samples.push_back({shape, p});
        const Polygon fp = footprintPolygon(shape, p);
        pts.insert(pts.end(), fp.begin(), fp.end());
        if (length == 0.0)
            break;
    }
    corridor.hull = convexHull(std::move(pts));
    return corridor;
}

} // namespace rtc
