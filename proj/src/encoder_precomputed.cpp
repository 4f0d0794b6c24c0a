#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rcg/encoder.hpp"
#include "rcg/error.hpp"
#include "rcg/hash.hpp"

namespace rcg {

PrecomputedEncoder::PrecomputedEncoder(std::vector<std::string> ids, std::vector<float> rows,
                                       std::size_t dimension, std::string fingerprint)
    : ids_(std::move(ids)), rows_(std::move(rows)) {
  if (rows_.size() != ids_.size() * dimension) {
    throw Error(ErrorCode::DimensionMismatch, "vector storage does not match ids x dimension");
  }
  position_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!position_.emplace(ids_[i], i).second) throw Error(ErrorCode::DuplicateId, "duplicate vector id '" + ids_[i] + "'");
  }
  descriptor_ = {"precomputed", dimension, true, std::move(fingerprint)};
}

Embedding PrecomputedEncoder::lookup(const std::string& id) const {
  auto it = position_.find(id);
  if (it == position_.end()) throw Error(ErrorCode::MissingVector, "no precomputed vector for id '" + id + "'");
  const std::size_t dim = *descriptor_.dimension;
  Embedding e;
  e.kind = EmbeddingKind::dense;
  e.fingerprint = descriptor_.fingerprint;
  e.dense.assign(rows_.begin() + static_cast<std::ptrdiff_t>(it->second * dim),
                 rows_.begin() + static_cast<std::ptrdiff_t>((it->second + 1) * dim));
  e.norm = static_cast<float>(l2_norm(e.dense));
  return e;
}

std::vector<Embedding> PrecomputedEncoder::encode_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  throw Error(ErrorCode::Unsupported, "precomputed encoder resolves example ids only; free text cannot be encoded");
}

std::vector<Embedding> PrecomputedEncoder::encode_examples(std::span<const ReviewExample> examples) const {
  std::vector<Embedding> out;
  out.reserve(examples.size());
  for (const ReviewExample& ex : examples) out.push_back(lookup(ex.id));
  return out;
}

PrecomputedEncoder load_precomputed_encoder(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  std::vector<std::string> ids;
  std::vector<float> rows;
  std::optional<std::size_t> dimension;
  Sha256 hash;
  hash.update("precomputed-v1\n");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("id") || !record.contains("vector") ||
        !record["vector"].is_array()) {
      throw Error(ErrorCode::MalformedRecord, where + ": expected {\"id\", \"vector\"}");
    }
    const auto& id_field = record["id"];
    std::string id = id_field.is_string() ? id_field.get<std::string>()
                     : id_field.is_number_integer() ? std::to_string(id_field.get<long long>())
                                                    : std::string();
    if (id.empty()) throw Error(ErrorCode::MalformedRecord, where + ": missing id");

    std::vector<float> vector;
    vector.reserve(record["vector"].size());
    for (const auto& v : record["vector"]) {
      if (!v.is_number()) throw Error(ErrorCode::MalformedRecord, where + ": non-numeric component");
      vector.push_back(v.get<float>());
    }
    if (!all_finite(vector)) throw Error(ErrorCode::MalformedRecord, where + ": non-finite component");
    if (vector.empty()) throw Error(ErrorCode::DimensionMismatch, where + ": empty vector");
    if (!dimension) dimension = vector.size();
    if (vector.size() != *dimension) {
      throw Error(ErrorCode::DimensionMismatch, where + ": dimension " + std::to_string(vector.size()) +
                                                    " differs from " + std::to_string(*dimension));
    }
    normalize(vector);
    hash.update(id).update("\n").update(vector.data(), vector.size() * sizeof(float));
    ids.push_back(std::move(id));
    rows.insert(rows.end(), vector.begin(), vector.end());
  }
  if (!dimension) throw Error(ErrorCode::EmptyInput, path.string() + ": no vectors");
  return PrecomputedEncoder(std::move(ids), std::move(rows), *dimension, "precomputed:" + hash.hex());
}

}  // namespace rcg
