// Compiled with -mavx2 (no -mfma): the kernel is only entered after a runtime
// CPU check in activeIsa()/isaAvailable().

#include "rtc/nearest.hpp"

#include <immintrin.h>

#include <cmath>
#include <stdexcept>

namespace rtc::simd {

NearestResult nearestAvx2(PoseColumns poses, const Pose2& query, double w_rot)
{
    const std::size_t n = poses.size();
    if (n == 0)
        throw std::invalid_argument("nearest: empty pose table");

    const __m256d qx = _mm256_set1_pd(query.x);
    const __m256d qy = _mm256_set1_pd(query.y);
    const __m256d qt = _mm256_set1_pd(query.theta);
    const __m256d w = _mm256_set1_pd(w_rot);
    const __m256d pi = _mm256_set1_pd(kPi);
    const __m256d neg_pi = _mm256_set1_pd(-kPi);
    const __m256d two_pi = _mm256_set1_pd(kTwoPi);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d step = _mm256_set1_pd(4.0);

    __m256d best = _mm256_set1_pd(INFINITY);
    __m256d best_idx = _mm256_setzero_pd();
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(poses.x.data() + i), qx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(poses.y.data() + i), qy);
        const __m256d dist = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));

        __m256d dth = _mm256_sub_pd(_mm256_loadu_pd(poses.theta.data() + i), qt);
        const __m256d over = _mm256_cmp_pd(dth, pi, _CMP_GT_OQ);
        const __m256d under = _mm256_cmp_pd(dth, neg_pi, _CMP_LE_OQ);
        dth = _mm256_blendv_pd(dth, _mm256_sub_pd(dth, two_pi), over);
        dth = _mm256_blendv_pd(dth, _mm256_add_pd(dth, two_pi), under);

        const __m256d d = _mm256_add_pd(dist, _mm256_mul_pd(w, _mm256_and_pd(dth, abs_mask)));
        const __m256d better = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, d, better);
        best_idx = _mm256_blendv_pd(best_idx, idx, better);
        idx = _mm256_add_pd(idx, step);
    }

    alignas(32) double lane_best[4];
    alignas(32) double lane_idx[4];
    _mm256_store_pd(lane_best, best);
    _mm256_store_pd(lane_idx, best_idx);

    NearestResult result{0, INFINITY};
    for (int l = 0; l < 4; ++l) {
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
