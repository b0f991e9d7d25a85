#include "rtc/nearest.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace rtc::simd {

NearestResult nearestScalar(PoseColumns poses, const Pose2& query, double w_rot)
{
    const std::size_t n = poses.size();
    if (n == 0)
        throw std::invalid_argument("nearest: empty pose table");
    NearestResult best{0, INFINITY};
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = poses.x[i] - query.x;
        const double dy = poses.y[i] - query.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        // Inputs are wrapped, so the difference lies in [-2pi, 2pi] and one
        // correction suffices; each correction is exact (Sterbenz).
        double dth = poses.theta[i] - query.theta;
        if (dth > kPi)
            dth -= kTwoPi;
        else if (dth <= -kPi)
            dth += kTwoPi;
        const double d = dist + w_rot * std::abs(dth);
        if (d < best.distance) {
            best.distance = d;
            best.index = i;
        }
    }
    return best;
}

std::string_view isaName(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    case Isa::Neon:
        return "neon";
    }
    return "unknown";
}

bool isaAvailable(Isa isa)
{
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa activeIsa()
{
    static const Isa isa = [] {
        if (const char* env = std::getenv("RTC_SIMD"); env && std::string_view(env) == "scalar")
            return Isa::Scalar;
        if (isaAvailable(Isa::Avx2))
            return Isa::Avx2;
        if (isaAvailable(Isa::Neon))
            return Isa::Neon;
        return Isa::Scalar;
    }();
    return isa;
}

NearestResult nearest(Isa isa, PoseColumns poses, const Pose2& query, double w_rot)
{
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
        return nearestAvx2(poses, query, w_rot);
#endif
#if defined(__aarch64__)
    case Isa::Neon:
        return nearestNeon(poses, query, w_rot);
#endif
    default:
        return nearestScalar(poses, query, w_rot);
    }
}

NearestResult nearest(PoseColumns poses, const Pose2& query, double w_rot)
{
    return nearest(activeIsa(), poses, query, w_rot);
}

} // namespace rtc::simd
