#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcg {

enum class EmbeddingKind { dense, sparse };

/// (term index, weight) pairs sorted by ascending index, no duplicates.
using SparseVector = std::vector<std::pair<std::uint32_t, float>>;

struct Embedding {
  EmbeddingKind kind = EmbeddingKind::dense;
  std::vector<float> dense;
  SparseVector sparse;
  float norm = 0.0f;
  std::string fingerprint;

  std::size_t nonzeros() const noexcept { return kind == EmbeddingKind::dense ? dense.size() : sparse.size(); }

  bool operator==(const Embedding&) const = default;
};

/// Euclidean norm accumulated in double.
double l2_norm(std::span<const float> values);
double l2_norm(const SparseVector& values);

/// Scales to unit length in place and returns the norm of the result
/// (1 within rounding, or 0 for an all-zero input).
float normalize(std::vector<float>& values);
float normalize(SparseVector& values);

/// Inner product; both embeddings must be of the same kind.
double dot(const Embedding& a, const Embedding& b);

bool all_finite(std::span<const float> values) noexcept;

}  // namespace rcg
