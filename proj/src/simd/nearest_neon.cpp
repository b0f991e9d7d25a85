// AArch64 only; on other targets this translation unit is empty.

#include "rtc/nearest.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <stdexcept>

namespace rtc::simd {

NearestResult nearestNeon(PoseColumns poses, const Pose2& query, double w_rot)
{
    const std::size_t n = poses.size();
    if (n == 0)
        throw std::invalid_argument("nearest: empty pose table");

    const float64x2_t qx = vdupq_n_f64(query.x);
    const float64x2_t qy = vdupq_n_f64(query.y);
    const float64x2_t qt = vdupq_n_f64(query.theta);
    const float64x2_t w = vdupq_n_f64(w_rot);
    const float64x2_t pi = vdupq_n_f64(kPi);
    const float64x2_t neg_pi = vdupq_n_f64(-kPi);
    const float64x2_t two_pi = vdupq_n_f64(kTwoPi);
    const float64x2_t step = vdupq_n_f64(2.0);

    float64x2_t best = vdupq_n_f64(INFINITY);
    float64x2_t best_idx = vdupq_n_f64(0.0);
    const double idx_init[2] = {0.0, 1.0};
    float64x2_t idx = vld1q_f64(idx_init);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // Separate multiply and add: vfmaq would change rounding.
        const float64x2_t dx = vsubq_f64(vld1q_f64(poses.x.data() + i), qx);
        const float64x2_t dy = vsubq_f64(vld1q_f64(poses.y.data() + i), qy);
        const float64x2_t dist = vsqrtq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));

        float64x2_t dth = vsubq_f64(vld1q_f64(poses.theta.data() + i), qt);
        const uint64x2_t over = vcgtq_f64(dth, pi);
        const uint64x2_t under = vcleq_f64(dth, neg_pi);
        dth = vbslq_f64(over, vsubq_f64(dth, two_pi), dth);
        dth = vbslq_f64(under, vaddq_f64(dth, two_pi), dth);

        const float64x2_t d = vaddq_f64(dist, vmulq_f64(w, vabsq_f64(dth)));
        const uint64x2_t better = vcltq_f64(d, best);
        best = vbslq_f64(better, d, best);
        best_idx = vbslq_f64(better, idx, best_idx);
        idx = vaddq_f64(idx, step);
    }

    double lane_best[2];
    double lane_idx[2];
    vst1q_f64(lane_best, best);
    vst1q_f64(lane_idx, best_idx);

    NearestResult result{0, INFINITY};
    for (int l = 0; l < 2; ++l) {
        const auto li = static_cast<std::size_t>(lane_idx[l]);
        if (lane_best[l] < result.distance || (lane_best[l] == result.distance && li < result.index)) {
            result.distance = lane_best[l];
            result.index = li;
        }
    }
    for (; i < n; ++i) {
        const double dx = poses.x[i] - query.x;
        const double dy = poses.y[i] - query.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        double dth = poses.theta[i] - query.theta;
        if (dth > kPi)
            dth -= kTwoPi;
        else if (dth <= -kPi)
            dth += kTwoPi;
        const double d = dist + w_rot * std::abs(dth);
        if (d < result.distance) {
            result.distance = d;
            result.index = i;
        }
    }
    return result;
}

} // namespace rtc::simd

#endif
