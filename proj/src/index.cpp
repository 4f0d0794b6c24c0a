#include "rcg/index.hpp"

#include <algorithm>
#include <numeric>

#include "rcg/error.hpp"
#include "rcg/simd/dot.hpp"

namespace rcg {

RetrievalDatabase::RetrievalDatabase(std::vector<Entry> entries, std::span<const Embedding> embeddings,
                                     std::string fingerprint)
    : entries_(std::move(entries)), fingerprint_(std::move(fingerprint)) {
  if (entries_.size() != embeddings.size()) {
    throw Error(ErrorCode::InvalidArgument, "one embedding per database entry required");
  }
  if (entries_.empty()) throw Error(ErrorCode::EmptyCorpus, "retrieval database needs at least one entry");

  kind_ = embeddings.front().kind;
  dimension_ = kind_ == EmbeddingKind::dense ? embeddings.front().dense.size() : 0;
  if (kind_ == EmbeddingKind::dense) {
    rows_.reserve(entries_.size() * dimension_);
  } else {
    sparse_rows_.reserve(entries_.size());
  }

  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Embedding& e = embeddings[i];
    if (e.fingerprint != fingerprint_) {
      throw Error(ErrorCode::EncoderMismatch, "entry '" + entries_[i].id + "' was encoded with a different encoder");
    }
    if (e.kind != kind_) throw Error(ErrorCode::EncoderMismatch, "mixed dense and sparse embeddings");
    if (kind_ == EmbeddingKind::dense) {
      if (e.dense.size() != dimension_) throw Error(ErrorCode::DimensionMismatch, "ragged embedding dimensions");
      if (!all_finite(e.dense)) throw Error(ErrorCode::ProtocolViolation, "non-finite embedding component");
      rows_.insert(rows_.end(), e.dense.begin(), e.dense.end());
    } else {
      for (const auto& [term, weight] : e.sparse) {
        if (term >= postings_.size()) postings_.resize(term + 1);
        postings_[term].emplace_back(static_cast<std::uint32_t>(i), weight);
      }
      sparse_rows_.push_back(e.sparse);
    }
    if (e.nonzeros() == 0 || e.norm == 0.0f) zero_norm_ids_.push_back(entries_[i].id);
    if (!position_.emplace(entries_[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate database id '" + entries_[i].id + "'");
    }
  }
  if (kind_ == EmbeddingKind::sparse) dimension_ = postings_.size();

  for (std::size_t i = 0; i < entries_.size(); ++i) {
    by_code_[entries_[i].code].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint32_t> order(entries_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return entries_[a].id < entries_[b].id; });
  id_rank_.resize(entries_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
}

std::optional<std::size_t> RetrievalDatabase::position_of(std::string_view id) const {
  auto it = position_.find(std::string(id));
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

Embedding RetrievalDatabase::embedding(std::size_t position) const {
  Embedding e;
  e.kind = kind_;
  e.fingerprint = fingerprint_;
  if (kind_ == EmbeddingKind::dense) {
    const auto begin = rows_.begin() + static_cast<std::ptrdiff_t>(position * dimension_);
    e.dense.assign(begin, begin + static_cast<std::ptrdiff_t>(dimension_));
    e.norm = static_cast<float>(l2_norm(e.dense));
  } else {
    e.sparse = sparse_rows_[position];
    e.norm = static_cast<float>(l2_norm(e.sparse));
  }
  return e;
}

std::span<const std::uint32_t> RetrievalDatabase::positions_with_code(std::string_view code) const {
  auto it = by_code_.find(code);
  if (it == by_code_.end()) return {};
  return it->second;
}

void RetrievalDatabase::check_comparable(const Embedding& query) const {
  if (query.fingerprint != fingerprint_) {
    throw Error(ErrorCode::EncoderMismatch,
                "query fingerprint " + query.fingerprint + " does not match database " + fingerprint_);
  }
  if (query.kind != kind_) throw Error(ErrorCode::EncoderMismatch, "query and database embedding kinds differ");
  if (kind_ == EmbeddingKind::dense && query.dense.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch, "query dimension differs from database");
  }
}

std::vector<float> RetrievalDatabase::score_all(const Embedding& query) const {
  check_comparable(query);
  std::vector<float> scores(entries_.size(), 0.0f);
  if (kind_ == EmbeddingKind::dense) {
    simd::score_rows(rows_, dimension_, query.dense, scores);
    return scores;
  }
  // Accumulating postings in ascending term order gives each entry the same
  // sum, in the same order, as a sorted sparse merge.
  std::vector<double> acc(entries_.size(), 0.0);
  for (const auto& [term, weight] : query.sparse) {
    if (term >= postings_.size()) continue;
    for (const auto& [entry, value] : postings_[term]) acc[entry] += static_cast<double>(value) * weight;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) scores[i] = static_cast<float>(acc[i]);
  return scores;
}

namespace {

std::vector<char> eligibility(const RetrievalDatabase& db, const std::unordered_set<std::string>& exclude_ids,
                              std::optional<std::string_view> exclude_identical_code) {
  std::vector<char> eligible(db.size(), 1);
  for (const std::string& id : exclude_ids) {
    if (auto p = db.position_of(id)) eligible[*p] = 0;
  }
  if (exclude_identical_code) {
    for (std::uint32_t p : db.positions_with_code(*exclude_identical_code)) eligible[p] = 0;
  }
  return eligible;
}

void check_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
}

}  // namespace

RetrievalResult retrieve(const RetrievalDatabase& db, const Embedding& query, std::size_t k,
                         const std::unordered_set<std::string>& exclude_ids,
                         std::optional<std::string_view> exclude_identical_code) {
  check_k(k);
  db.check_comparable(query);
  const double norm = query.kind == EmbeddingKind::dense ? l2_norm(query.dense) : l2_norm(query.sparse);
  if (norm == 0.0) {
    throw Error(ErrorCode::ZeroQuery, "query embedding has zero norm");
  }
  const std::vector<float> scores = db.score_all(query);

  const std::vector<char> eligible = eligibility(db, exclude_ids, exclude_identical_code);
  std::vector<std::uint32_t> candidates;
  candidates.reserve(db.size());
  for (std::uint32_t i = 0; i < db.size(); ++i) {
    if (eligible[i]) candidates.push_back(i);
  }

  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return db.id_rank(a) < db.id_rank(b);
  };
  const std::size_t take = std::min(k, candidates.size());
  if (take < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                     better);
    candidates.resize(take);
  }
  std::sort(candidates.begin(), candidates.end(), better);

  RetrievalResult result;
  result.k_requested = k;
  result.neighbors.reserve(take);
  for (std::uint32_t p : candidates) result.neighbors.push_back({db.entry(p).id, scores[p], p});
  return result;
}

RetrievalResult retrieve_for_training(const RetrievalDatabase& db, const ReviewExample& example,
                                      const Encoder& encoder, std::size_t k) {
  if (encoder.descriptor().fingerprint != db.fingerprint()) {
    throw Error(ErrorCode::EncoderMismatch, "encoder fingerprint does not match database");
  }
  const std::vector<Embedding> query = encoder.encode_examples(std::span(&example, 1));
  RetrievalResult result = retrieve(db, query.front(), k, {example.id}, example.code);
  result.query_id = example.id;
  return result;
}

RetrievalResult lowest_id_fallback(const RetrievalDatabase& db, std::size_t k,
                                   const std::unordered_set<std::string>& exclude_ids,
                                   std::optional<std::string_view> exclude_identical_code) {
  check_k(k);
  const std::vector<char> eligible = eligibility(db, exclude_ids, exclude_identical_code);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < db.size(); ++i) {
    if (eligible[i]) candidates.push_back(i);
  }
  auto by_id = [&](std::uint32_t a, std::uint32_t b) { return db.id_rank(a) < db.id_rank(b); };
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    by_id);
  RetrievalResult result;
  result.k_requested = k;
  result.zero_query = true;
  for (std::size_t i = 0; i < take; ++i) result.neighbors.push_back({db.entry(candidates[i]).id, 0.0f, candidates[i]});
  return result;
}

RetrievalDatabase build_index(const Corpus& corpus, const Encoder& encoder) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot index an empty corpus");
  std::vector<Embedding> embeddings = encoder.encode_examples(corpus.examples());
  if (embeddings.size() != corpus.size()) {
    throw Error(ErrorCode::ProtocolViolation, "encoder returned the wrong number of embeddings");
  }
  std::vector<RetrievalDatabase::Entry> entries;
  entries.reserve(corpus.size());
  for (const ReviewExample& ex : corpus) entries.push_back({ex.id, ex.code, ex.comment});
  return RetrievalDatabase(std::move(entries), embeddings, encoder.descriptor().fingerprint);
}

}  // namespace rcg
