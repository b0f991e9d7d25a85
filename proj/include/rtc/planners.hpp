#pragma once

// Kinodynamic tree planners over the pushing dynamics: RRT and KPIECE.
//
// Budgets are checked only between iterations, and no sampling decision
// depends on the clock, so a request with an iteration cap (and an unbounded
// time budget) is fully reproducible.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rtc/dynamics.hpp"
#include "rtc/nearest.hpp"
#include "rtc/rng.hpp"
#include "rtc/scene.hpp"

namespace rtc {

enum class Algorithm
{
    RRT,
    KPIECE,
};

std::string_view algorithmName(Algorithm a);

enum class PlanStatus
{
    Solved,
    TimedOut,
    Infeasible,
};

std::string_view planStatusName(PlanStatus s);

struct PlannerParams
{
    double goal_bias = 0.05;
    int max_controls_per_extend = 5;
    double w_rot = kDefaultRotationWeight;
    double kpiece_cell_size = 0.05;
    /// Occupied 4-neighbors needed for a cell to count as interior.
    int kpiece_interior_threshold = 4;
    double kpiece_exterior_bias = 0.9;
    /// Sampled control durations are uniform in [min, max]; max is further
    /// capped by the scene's d_max.
    double min_control_duration = 0.2;
    double max_control_duration = 1.0;

    friend bool operator==(const PlannerParams&, const PlannerParams&) = default;
};

/// Throws ContractError when a tunable is out of range.
void validateParams(const PlannerParams& p);

struct PlannerRequest
{
    SystemConfiguration start;
    GoalSpec goal = ReachGoalObject{};
    double time_budget = std::numeric_limits<double>::infinity(); ///< seconds
    std::uint64_t max_iterations = 0;                              ///< 0 = unlimited
    std::uint64_t rng_seed = 0;
    Algorithm algorithm = Algorithm::RRT;
    PlannerParams params;
    ContactMask contacts;
    /// Checked between iterations; a set flag ends the search as TimedOut.
    const std::atomic<bool>* cancel = nullptr;
};

struct PlanStats
{
    std::uint64_t iterations = 0;
    std::size_t tree_size = 0;
    double wall_time = 0.0;
};

struct PlanResult
{
    PlanStatus status = PlanStatus::TimedOut;
    std::vector<Control> controls;
    SystemConfiguration final_state;
    PlanStats stats;
};

/// Same content, ignoring wall time.
bool samePlan(const PlanResult& a, const PlanResult& b);

/// A tree vertex: the state reached by applying `control` from `parent`.
struct Motion
{
    SystemConfiguration state;
    int parent = -1;
    Control control;
};

/// Shared machinery: tree storage, sampling, goal handling and the budgeted
/// solve loop. Subclasses implement one expansion step.
class TreePlanner
{
public:
    TreePlanner(PlannerRequest request, const Scene& scene);
    virtual ~TreePlanner() = default;

    PlanResult solve();

    /// One iteration. Returns true once a goal-satisfying motion was added.
    virtual bool expand() = 0;

    const std::vector<Motion>& motions() const { return motions_; }
    const PlannerRequest& request() const { return req_; }
    std::uint64_t iterations() const { return iterations_; }

protected:
    /// Appends a motion and returns its index; records it if it is a goal.
    int addMotion(Motion m);
    Control sampleControl();
    Pose2 sampleUniformRobotPose();
    Pose2 sampleGoalRobotPose();
    bool solved() const { return solution_ >= 0; }

    PlannerRequest req_;
    const Scene& scene_;
    Rng rng_;
    std::vector<Motion> motions_;
    simd::PoseTable robot_poses_;
    std::uint64_t iterations_ = 0;
    int solution_ = -1;

private:
    PlanResult extract(PlanStatus status, std::chrono::steady_clock::time_point t0) const;
};

class RrtPlanner final : public TreePlanner
{
public:
    RrtPlanner(PlannerRequest request, const Scene& scene);
    bool expand() override;
};

class KpiecePlanner final : public TreePlanner
{
public:
    KpiecePlanner(PlannerRequest request, const Scene& scene);
    bool expand() override;

    std::size_t cellCount() const { return cells_.size(); }
    std::size_t interiorCellCount() const { return interior_count_; }
    std::size_t exteriorCellCount() const { return cells_.size() - interior_count_; }

private:
    struct Cell
    {
        std::int64_t ix = 0, iy = 0;
        std::vector<int> motions;
        std::uint64_t selections = 0;
        int occupied_neighbors = 0;
        bool interior = false;
    };

    void insert(int motion);
    static std::int64_t key(std::int64_t ix, std::int64_t iy) { return (ix << 32) ^ (iy & 0xffffffff); }

    std::vector<Cell> cells_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    std::size_t interior_count_ = 0;
};

PlanResult planRRT(const PlannerRequest& req, const Scene& scene);
PlanResult planKPIECE(const PlannerRequest& req, const Scene& scene);
/// Dispatches on req.algorithm.
PlanResult plan(const PlannerRequest& req, const Scene& scene);

/// Independent replay: the rollout is valid throughout and the final state
/// satisfies the goal.
bool validateSolution(const SystemConfiguration& start, std::span<const Control> controls, const GoalSpec& goal,
                      const Scene& scene, const ContactMask& mask = {});

/// Cheap static check that a goal region can contain a valid state at all.
/// False means no robot pose / object placement inside the goal avoids the
/// static geometry.
bool goalStaticallyReachable(const GoalSpec& goal, const SystemConfiguration& q, const Scene& scene);

} // namespace rtc
