#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rcg/corpus.hpp"
#include "rcg/embedding.hpp"
#include "rcg/encoder.hpp"

namespace rcg {

struct Neighbor {
  std::string id;
  float score = 0.0f;
  std::size_t position = 0;  // row in the database

  bool operator==(const Neighbor&) const = default;
};

struct RetrievalResult {
  std::optional<std::string> query_id;
  std::vector<Neighbor> neighbors;
  std::size_t k_requested = 0;
  /// Set when the query had no usable terms and the lowest-id fallback was used.
  bool zero_query = false;
};

/// Exact inner-product search over a fixed set of (id, code, comment,
/// embedding) entries that share one encoder fingerprint.
class RetrievalDatabase {
 public:
  struct Entry {
    std::string id;
    std::string code;
    std::string comment;
  };

  RetrievalDatabase(std::vector<Entry> entries, std::span<const Embedding> embeddings, std::string fingerprint);

  // by_code_ views into entries_, so copies are not allowed.
  RetrievalDatabase(const RetrievalDatabase&) = delete;
  RetrievalDatabase& operator=(const RetrievalDatabase&) = delete;
  RetrievalDatabase(RetrievalDatabase&&) noexcept = default;
  RetrievalDatabase& operator=(RetrievalDatabase&&) noexcept = default;

  /// Throws EncoderMismatch/DimensionMismatch if `query` is not comparable.
  void check_comparable(const Embedding& query) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  EmbeddingKind kind() const noexcept { return kind_; }
  /// Dense dimension, or the sparse term space size.
  std::size_t dimension() const noexcept { return dimension_; }

  const Entry& entry(std::size_t position) const { return entries_[position]; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::optional<std::size_t> position_of(std::string_view id) const;
  Embedding embedding(std::size_t position) const;

  /// Entry ids whose embedding had zero norm at build time.
  std::span<const std::string> zero_norm_ids() const noexcept { return zero_norm_ids_; }

  /// float(inner product) of the query with every entry, in entry order.
  std::vector<float> score_all(const Embedding& query) const;

  std::span<const std::uint32_t> positions_with_code(std::string_view code) const;

  /// Rank of each entry's id in ascending byte order; used for tie-breaking.
  std::uint32_t id_rank(std::size_t position) const { return id_rank_[position]; }

 private:
  std::vector<Entry> entries_;
  std::string fingerprint_;
  EmbeddingKind kind_ = EmbeddingKind::dense;
  std::size_t dimension_ = 0;

  std::vector<float> rows_;                 // dense: size() x dimension_
  std::vector<SparseVector> sparse_rows_;   // sparse: one per entry
  std::vector<std::vector<std::pair<std::uint32_t, float>>> postings_;  // sparse: term -> (entry, weight)

  std::unordered_map<std::string, std::size_t> position_;
  std::unordered_map<std::string_view, std::vector<std::uint32_t>> by_code_;
  std::vector<std::uint32_t> id_rank_;
  std::vector<std::string> zero_norm_ids_;
};

RetrievalDatabase build_index(const Corpus& corpus, const Encoder& encoder);

/// Top-k entries by inner product, highest first, ties by ascending id, after
/// removing `exclude_ids` and entries whose code equals
/// `exclude_identical_code` byte for byte.
RetrievalResult retrieve(const RetrievalDatabase& db, const Embedding& query, std::size_t k,
                         const std::unordered_set<std::string>& exclude_ids = {},
                         std::optional<std::string_view> exclude_identical_code = std::nullopt);

/// Training-time retrieval: the example itself and any byte-identical code are
/// never returned.
RetrievalResult retrieve_for_training(const RetrievalDatabase& db, const ReviewExample& example,
                                      const Encoder& encoder, std::size_t k);

/// The k lowest-id eligible entries with score 0, flagged as zero_query.
RetrievalResult lowest_id_fallback(const RetrievalDatabase& db, std::size_t k,
                                   const std::unordered_set<std::string>& exclude_ids = {},
                                   std::optional<std::string_view> exclude_identical_code = std::nullopt);

/// Writes manifest.json and vectors.jsonl into `dir`.
/// Keys of `extra` are added to the manifest.
void save_index(const RetrievalDatabase& db, const std::filesystem::path& dir, std::string_view encoder_name,
                const nlohmann::json& extra = nlohmann::json::object());
RetrievalDatabase load_index(const std::filesystem::path& dir);

/// The manifest of an index directory, if one exists.
std::optional<nlohmann::json> read_index_manifest(const std::filesystem::path& dir);

}  // namespace rcg
