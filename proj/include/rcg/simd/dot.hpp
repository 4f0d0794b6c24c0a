#pragma once

// Dense inner-product kernels. Every variant computes float products in
// double precision and sums them in the same order: element i goes to lane
// i % 4, and the lanes reduce as (l0 + l2) + (l1 + l3). Because a float*float
// product is exact in double, fused and unfused multiply-add agree, so all
// variants return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rcg::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

namespace scalar {
double dot(const float* a, const float* b, std::size_t n) noexcept;
}
namespace avx2 {
double dot(const float* a, const float* b, std::size_t n) noexcept;
}
namespace neon {
double dot(const float* a, const float* b, std::size_t n) noexcept;
}

/// Variants compiled into this build and supported by the running CPU.
std::vector<Isa> available_isas();

/// The variant used by dot()/score_rows(). Defaults to the widest available;
/// RCG_SIMD=scalar in the environment pins the reference kernel.
Isa active_isa() noexcept;

/// Overrides the active variant; throws std::invalid_argument if unavailable.
void set_active_isa(Isa isa);

double dot(std::span<const float> a, std::span<const float> b) noexcept;
double dot(Isa isa, std::span<const float> a, std::span<const float> b) noexcept;

/// scores[r] = float(dot(rows[r*dim .. (r+1)*dim), query)).
void score_rows(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                std::span<float> scores) noexcept;

}  // namespace rcg::simd
