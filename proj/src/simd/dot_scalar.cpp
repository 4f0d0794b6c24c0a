#include "rcg/simd/dot.hpp"

namespace rcg::simd::scalar {

double dot(const float* a, const float* b, std::size_t n) noexcept {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane[0] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    lane[1] += static_cast<double>(a[i + 1]) * static_cast<double>(b[i + 1]);
    lane[2] += static_cast<double>(a[i + 2]) * static_cast<double>(b[i + 2]);
    lane[3] += static_cast<double>(a[i + 3]) * static_cast<double>(b[i + 3]);
  }
  for (std::size_t j = 0; i < n; ++i, ++j) {
    lane[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

}  // namespace rcg::simd::scalar
