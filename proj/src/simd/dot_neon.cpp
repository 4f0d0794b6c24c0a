#include <arm_neon.h>

#include "rcg/simd/dot.hpp"

namespace rcg::simd::neon {

double dot(const float* a, const float* b, std::size_t n) noexcept {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc01 = vfmaq_f64(acc01, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    acc23 = vfmaq_f64(acc23, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double lane[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1), vgetq_lane_f64(acc23, 0),
                    vgetq_lane_f64(acc23, 1)};
  for (std::size_t j = 0; i < n; ++i, ++j) {
    lane[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace rcg::simd::neon
