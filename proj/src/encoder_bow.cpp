#include <algorithm>

#include "rcg/encoder.hpp"
#include "rcg/error.hpp"
#include "rcg/hash.hpp"
#include "rcg/tokenizer.hpp"

namespace rcg {

std::vector<Embedding> Encoder::encode_examples(std::span<const ReviewExample> examples) const {
  std::vector<std::string> codes;
  codes.reserve(examples.size());
  for (const ReviewExample& ex : examples) codes.push_back(ex.code);
  return encode_batch(codes);
}

BowEncoder::BowEncoder(std::vector<std::string> vocabulary) : vocabulary_(std::move(vocabulary)) {
  Sha256 hash;
  hash.update("bow-v1\n");
  lookup_.reserve(vocabulary_.size());
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!lookup_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate vocabulary entry '" + vocabulary_[i] + "'");
    }
    hash.update(vocabulary_[i]).update("\n");
  }
  descriptor_ = {"bow", std::nullopt, true, "bow:" + hash.hex()};
}

std::optional<std::uint32_t> BowEncoder::term_index(const std::string& token) const {
  auto it = lookup_.find(token);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Embedding BowEncoder::encode(std::string_view text) const {
  std::vector<std::uint32_t> terms;
  for (const std::string& token : tokenize(text)) {
    if (auto it = lookup_.find(token); it != lookup_.end()) terms.push_back(it->second);
  }
  std::sort(terms.begin(), terms.end());

  Embedding e;
  e.kind = EmbeddingKind::sparse;
  e.fingerprint = descriptor_.fingerprint;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i;
    while (j < terms.size() && terms[j] == terms[i]) ++j;
    e.sparse.emplace_back(terms[i], static_cast<float>(j - i));
    i = j;
  }
  e.norm = normalize(e.sparse);
  return e;
}

std::vector<Embedding> BowEncoder::encode_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(encode(text));
  return out;
}

BowEncoder build_bow_encoder(const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from an empty corpus");
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::uint32_t> seen;
  for (const ReviewExample& ex : corpus) {
    for (std::string& token : tokenize(ex.code)) {
      if (seen.emplace(token, static_cast<std::uint32_t>(vocabulary.size())).second) {
        vocabulary.push_back(std::move(token));
      }
    }
  }
  return BowEncoder(std::move(vocabulary));
}

}  // namespace rcg
