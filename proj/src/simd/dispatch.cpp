#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rcg/simd/dot.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define RCG_HAVE_AVX2_KERNEL 1
#endif
#if defined(__aarch64__)
#define RCG_HAVE_NEON_KERNEL 1
#endif

namespace rcg::simd {
namespace {

using DotFn = double (*)(const float*, const float*, std::size_t) noexcept;

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#ifdef RCG_HAVE_AVX2_KERNEL
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#ifdef RCG_HAVE_NEON_KERNEL
      return true;
#else
      return false;
#endif
  }
  return false;
}

DotFn kernel_for(Isa isa) noexcept {
  switch (isa) {
#ifdef RCG_HAVE_AVX2_KERNEL
    case Isa::avx2: return &avx2::dot;
#endif
#ifdef RCG_HAVE_NEON_KERNEL
    case Isa::neon: return &neon::dot;
#endif
    default: return &scalar::dot;
  }
}

Isa detect() noexcept {
  if (const char* forced = std::getenv("RCG_SIMD"); forced != nullptr && std::string(forced) == "scalar") {
    return Isa::scalar;
  }
  if (cpu_has(Isa::avx2)) return Isa::avx2;
  if (cpu_has(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (cpu_has(isa)) out.push_back(isa);
  }
  return out;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_has(isa)) throw std::invalid_argument("SIMD variant not available: " + std::string(to_string(isa)));
  active().store(isa, std::memory_order_relaxed);
}

double dot(Isa isa, std::span<const float> a, std::span<const float> b) noexcept {
  return kernel_for(isa)(a.data(), b.data(), std::min(a.size(), b.size()));
}

double dot(std::span<const float> a, std::span<const float> b) noexcept { return dot(active_isa(), a, b); }

void score_rows(std::span<const float> rows, std::size_t dim, std::span<const float> query,
                std::span<float> scores) noexcept {
  const DotFn kernel = kernel_for(active_isa());
  const float* row = rows.data();
  for (std::size_t r = 0; r < scores.size(); ++r, row += dim) {
    scores[r] = static_cast<float>(kernel(row, query.data(), dim));
  }
}

}  // namespace rcg::simd
