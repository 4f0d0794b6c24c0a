#include <doctest.h>

#include <stdexcept>

#include <bit>
#include <cstring>
#include <random>

#include "rcg/simd/dot.hpp"

namespace simd = rcg::simd;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::vector<float> random_vector(std::mt19937_64& rng, std::size_t n, float scale) {
  std::normal_distribution<float> dist(0.0f, scale);
  std::vector<float> v(n);
  for (float& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernel") {
  const std::vector<float> a = {1, 2, 3, 4, 5};
  const std::vector<float> b = {5, 4, 3, 2, 1};
  CHECK(simd::scalar::dot(a.data(), b.data(), 5) == 35.0);
  CHECK(simd::scalar::dot(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("every available variant is bit-identical to the scalar reference") {
  std::mt19937_64 rng(2024);
  const auto isas = simd::available_isas();
  MESSAGE("active SIMD variant: " << simd::to_string(simd::active_isa()) << ", available: " << isas.size());
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257, 768, 1023}) {
    for (float scale : {1e-3f, 1.0f, 1e4f}) {
      const auto a = random_vector(rng, n, scale);
      const auto b = random_vector(rng, n, scale);
      const double reference = simd::scalar::dot(a.data(), b.data(), n);
      for (simd::Isa isa : isas) {
        CAPTURE(simd::to_string(isa));
        CAPTURE(n);
        CHECK(bits(simd::dot(isa, a, b)) == bits(reference));
      }
    }
  }
}

TEST_CASE("score_rows agrees with per-row dot under each variant") {
  std::mt19937_64 rng(5);
  const std::size_t dim = 13, rows = 37;
  const auto matrix = random_vector(rng, dim * rows, 1.0f);
  const auto query = random_vector(rng, dim, 1.0f);
  const simd::Isa original = simd::active_isa();
  std::vector<float> reference(rows);
  simd::set_active_isa(simd::Isa::scalar);
  simd::score_rows(matrix, dim, query, reference);
  for (simd::Isa isa : simd::available_isas()) {
    simd::set_active_isa(isa);
    std::vector<float> scores(rows);
    simd::score_rows(matrix, dim, query, scores);
    CHECK(std::memcmp(scores.data(), reference.data(), rows * sizeof(float)) == 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = simd::scalar::dot(matrix.data() + r * dim, query.data(), dim);
      CHECK(scores[r] == static_cast<float>(d));
    }
  }
  simd::set_active_isa(original);
}

TEST_CASE("accuracy against long double accumulation") {
  std::mt19937_64 rng(9);
  const auto a = random_vector(rng, 4096, 1.0f);
  const auto b = random_vector(rng, 4096, 1.0f);
  long double exact = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) exact += static_cast<long double>(a[i]) * b[i];
  CHECK(simd::dot(a, b) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-12));
}

TEST_CASE("unavailable variant is rejected") {
  const auto isas = simd::available_isas();
  for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon}) {
    if (std::find(isas.begin(), isas.end(), isa) == isas.end()) {
      CHECK_THROWS_AS(simd::set_active_isa(isa), std::invalid_argument);
    }
  }
}
