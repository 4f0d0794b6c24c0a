#include <immintrin.h>

#include "rcg/simd/dot.hpp"

namespace rcg::simd::avx2 {

double dot(const float* a, const float* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
    const __m256d vb = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
    acc = _mm256_fmadd_pd(va, vb, acc);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t j = 0; i < n; ++i, ++j) {
    lane[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace rcg::simd::avx2
