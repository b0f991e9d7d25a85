#pragma once

// Nearest-neighbor scan over SE(2) poses stored column-wise.
//
// The scalar kernel is the reference. Vector kernels must return the same
// index and a bit-identical distance: no fused multiply-add, the same wrap
// sequence for the heading difference, and ties resolved to the lowest index.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rtc/geometry.hpp"

namespace rtc::simd {

struct PoseColumns
{
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> theta;

    std::size_t size() const { return x.size(); }
};

/// Growable column store used by the planners' trees.
class PoseTable
{
public:
    void push(const Pose2& p)
    {
        x_.push_back(p.x);
        y_.push_back(p.y);
        theta_.push_back(p.theta);
    }
    void clear()
    {
        x_.clear();
        y_.clear();
        theta_.clear();
    }
    std::size_t size() const { return x_.size(); }
    PoseColumns columns() const { return {x_, y_, theta_}; }

private:
    std::vector<double> x_, y_, theta_;
};

struct NearestResult
{
    std::size_t index = 0;
    double distance = 0.0;
};

enum class Isa
{
    Scalar,
    Avx2,
    Neon,
};

std::string_view isaName(Isa isa);

/// Kernels require a non-empty table.
NearestResult nearestScalar(PoseColumns poses, const Pose2& query, double w_rot);
#if defined(__x86_64__) || defined(_M_X64)
NearestResult nearestAvx2(PoseColumns poses, const Pose2& query, double w_rot);
#endif
#if defined(__aarch64__)
NearestResult nearestNeon(PoseColumns poses, const Pose2& query, double w_rot);
#endif

/// True if `isa` is compiled in and supported by the running CPU.
bool isaAvailable(Isa isa);

/// Best available kernel, chosen once per process. Setting RTC_SIMD=scalar
/// in the environment forces the reference kernel.
Isa activeIsa();

NearestResult nearest(PoseColumns poses, const Pose2& query, double w_rot);
NearestResult nearest(Isa isa, PoseColumns poses, const Pose2& query, double w_rot);

} // namespace rtc::simd
