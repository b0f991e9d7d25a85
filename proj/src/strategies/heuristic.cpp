#include <cmath>

#include "rtc/strategies.hpp"

namespace rtc {

Corridor goalCorridor(const SystemConfiguration& q, const Scene& scene, double step)
{
    const Vec2 g = q.objects[scene.goalIndex()].position();
    return sweptCorridor(scene.robot().shape, q.robot, Pose2(g.x, g.y, q.robot.theta), step);
}

std::optional<BlockingObstacle> firstBlockingObstacle(const SystemConfiguration& q, const Scene& scene,
                                                      const Corridor& corridor)
{
    const auto movables = scene.movables();
    const Vec2 start = corridor.footprint_samples.front().pose.position();
    std::optional<BlockingObstacle> best;
    for (std::size_t i = 0; i < movables.size(); ++i) {
        if (i == scene.goalIndex())
            continue;
        if (!shapeIntersectsPolygon(movables[i].shape, q.objects[i], corridor.hull))
            continue;
        // Entry point: first footprint sample the object overlaps. Objects
        // grazing only the hull between samples enter at the far end.
        double arc = norm(corridor.footprint_samples.back().pose.position() - start);
        for (const FootprintSample& f : corridor.footprint_samples) {
            if (overlap(f.shape, f.pose, movables[i].shape, q.objects[i])) {
                arc = norm(f.pose.position() - start);
                break;
            }
        }
        if (!best || arc < best->arc_length)
            best = BlockingObstacle{i, arc};
    }
    return best;
}

bool placementValid(const SystemConfiguration& q, const Scene& scene, std::size_t index, Vec2 centroid,
                    std::span<const Polygon> keep_out, double margin)
{
    if (!scene.workspace().contains(centroid))
        return false;
    const auto movables = scene.movables();
    const ConvexShape& shape = movables[index].shape;
    const Pose2 pose(centroid.x, centroid.y, q.objects[index].theta);
    if (overlap(scene.robot().shape, q.robot, shape, pose))
        return false;
    for (std::size_t j = 0; j < movables.size(); ++j)
        if (j != index && overlap(movables[j].shape, q.objects[j], shape, pose))
            return false;
    for (const BodySpec& s : scene.statics())
        if (overlap(s.shape, s.initial_pose, shape, pose))
            return false;
    return !intersectsAny(shape, pose, keep_out, margin);
}

std::optional<HighLevelAction> heuristicNext(const SystemConfiguration& q, const Scene& scene, Rng& rng,
                                             const HeuristicParams& params)
{
    const Corridor corridor = goalCorridor(q, scene, params.sweep_step);
    const auto blocker = firstBlockingObstacle(q, scene, corridor);
    if (!blocker)
        return goalAction(scene);

    const std::size_t i = blocker->index;
    const std::string& id = scene.movables()[i].id;
    const Vec2 c = q.objects[i].position();
    const std::span<const Polygon> keep_out(&corridor.hull, 1);

    for (int k = 0; k < params.local_samples; ++k) {
        // Uniform in the disk: radius from the square root of a uniform draw.
        const double r = params.local_radius * std::sqrt(rng.uniform01());
        const double a = rng.uniform(-kPi, kPi);
        const Vec2 p = c + Vec2{r * std::cos(a), r * std::sin(a)};
        if (placementValid(q, scene, i, p, keep_out))
            return HighLevelAction{id, p};
    }
    const Rect& ws = scene.workspace();
    for (int k = 0; k < params.global_samples; ++k) {
        const Vec2 p{rng.uniform(ws.x_min, ws.x_max), rng.uniform(ws.y_min, ws.y_max)};
        if (placementValid(q, scene, i, p, keep_out))
            return HighLevelAction{id, p};
    }
    return std::nullopt;
}

} // namespace rtc
