#include <cmath>

#include "rtc/planners.hpp"

namespace rtc {

// Single-level KPIECE: states are projected to the robot's (x, y) on a uniform
// grid. A cell is interior once enough of its 4-neighbors are occupied.
// Expansion picks exterior cells most of the time, preferring cells that have
// been selected rarely, then applies one random control from a random motion
// in that cell.

KpiecePlanner::KpiecePlanner(PlannerRequest request, const Scene& scene) : TreePlanner(std::move(request), scene)
{
    insert(addMotion({req_.start, -1, {}}));
}

void KpiecePlanner::insert(int motion)
{
    const Pose2& p = motions_[motion].state.robot;
    const double size = req_.params.kpiece_cell_size;
    const auto ix = static_cast<std::int64_t>(std::floor(p.x / size));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y / size));

    if (auto it = index_.find(key(ix, iy)); it != index_.end()) {
        cells_[it->second].motions.push_back(motion);
        return;
    }

    const int threshold = req_.params.kpiece_interior_threshold;
    Cell cell;
    cell.ix = ix;
    cell.iy = iy;
    cell.motions.push_back(motion);
    constexpr std::int64_t kNeighbors[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& d : kNeighbors) {
        auto it = index_.find(key(ix + d[0], iy + d[1]));
        if (it == index_.end())
            continue;
        ++cell.occupied_neighbors;
        Cell& nb = cells_[it->second];
        ++nb.occupied_neighbors;
        if (!nb.interior && nb.occupied_neighbors >= threshold) {
            nb.interior = true;
            ++interior_count_;
        }
    }
    if (cell.occupied_neighbors >= threshold) {
        cell.interior = true;
        ++interior_count_;
    }
    index_.emplace(key(ix, iy), cells_.size());
    cells_.push_back(std::move(cell));
}

bool KpiecePlanner::expand()
{
    const std::size_t exterior = exteriorCellCount();
    bool want_interior;
    if (exterior == 0)
        want_interior = true;
    else if (interior_count_ == 0)
        want_interior = false;
    else
        want_interior = !rng_.bernoulli(req_.params.kpiece_exterior_bias);

    // Roulette over the chosen class, weight 1 / (1 + selections^2).
    double total = 0.0;
    for (const Cell& c : cells_)
        if (c.interior == want_interior)
            total += 1.0 / (1.0 + static_cast<double>(c.selections * c.selections));
    double pick = rng_.uniform01() * total;
    Cell* chosen = nullptr;
    for (Cell& c : cells_) {
        if (c.interior != want_interior)
            continue;
        chosen = &c;
        pick -= 1.0 / (1.0 + static_cast<double>(c.selections * c.selections));
        if (pick < 0.0)
            break;
    }
    ++chosen->selections;
    const int from = chosen->motions[rng_.below(chosen->motions.size())];

    const Control u = sampleControl();
    auto step = propagate(motions_[from].state, u, scene_, req_.contacts);
    if (step.report.valid)
        insert(addMotion({std::move(step.state), from, u}));
    return solved();
}

PlanResult planKPIECE(const PlannerRequest& req, const Scene& scene)
{
    return KpiecePlanner(req, scene).solve();
}

} // namespace rtc
