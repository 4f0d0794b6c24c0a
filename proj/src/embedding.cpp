#include "rcg/embedding.hpp"

#include <cmath>

#include "rcg/error.hpp"
#include "rcg/simd/dot.hpp"

namespace rcg {

double l2_norm(std::span<const float> values) { return std::sqrt(simd::dot(values, values)); }

double l2_norm(const SparseVector& values) {
  double sum = 0.0;
  for (const auto& [index, value] : values) sum += static_cast<double>(value) * value;
  return std::sqrt(sum);
}

float normalize(std::vector<float>& values) {
  const double norm = l2_norm(values);
  if (norm == 0.0) return 0.0f;
  for (float& v : values) v = static_cast<float>(v / norm);
  return static_cast<float>(l2_norm(values));
}

float normalize(SparseVector& values) {
  const double norm = l2_norm(values);
  if (norm == 0.0) return 0.0f;
  for (auto& entry : values) entry.second = static_cast<float>(entry.second / norm);
  return static_cast<float>(l2_norm(values));
}

double dot(const Embedding& a, const Embedding& b) {
  if (a.kind != b.kind) throw Error(ErrorCode::EncoderMismatch, "dense/sparse embeddings are not comparable");
  if (a.kind == EmbeddingKind::dense) {
    if (a.dense.size() != b.dense.size()) throw Error(ErrorCode::DimensionMismatch, "embedding dimensions differ");
    return simd::dot(a.dense, b.dense);
  }
  double sum = 0.0;
  auto ia = a.sparse.begin();
  auto ib = b.sparse.begin();
  while (ia != a.sparse.end() && ib != b.sparse.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += static_cast<double>(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

bool all_finite(std::span<const float> values) noexcept {
  for (float v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace rcg
