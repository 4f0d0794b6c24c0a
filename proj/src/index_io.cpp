#include <fstream>
#include <nlohmann/json.hpp>

#include "rcg/error.hpp"
#include "rcg/index.hpp"

namespace rcg {

using nlohmann::json;

namespace {

constexpr int kIndexSchemaVersion = 1;

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedRecord, path.string() + ": invalid JSON");
  return doc;
}

}  // namespace

void save_index(const RetrievalDatabase& db, const std::filesystem::path& dir, std::string_view encoder_name,
                const json& extra) {
  std::filesystem::create_directories(dir);
  const bool dense = db.kind() == EmbeddingKind::dense;
  json manifest = {
      {"schema_version", kIndexSchemaVersion},
      {"encoder", encoder_name},
      {"fingerprint", db.fingerprint()},
      {"size", db.size()},
      {"kind", dense ? "dense" : "sparse"},
      {"dimension", dense ? json(db.dimension()) : json(nullptr)},
      {"vectors", "vectors.jsonl"},
  };
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
  }

  std::ofstream out(dir / "vectors.jsonl", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "vectors.jsonl").string());
  for (std::size_t i = 0; i < db.size(); ++i) {
    const auto& entry = db.entry(i);
    const Embedding e = db.embedding(i);
    json line = {{"id", entry.id}};
    if (dense) {
      line["vector"] = e.dense;
    } else {
      json indices = json::array();
      json values = json::array();
      for (const auto& [term, weight] : e.sparse) {
        indices.push_back(term);
        values.push_back(weight);
      }
      line["indices"] = std::move(indices);
      line["values"] = std::move(values);
    }
    line["code"] = entry.code;
    line["comment"] = entry.comment;
    out << line.dump() << '\n';
  }
}

std::optional<json> read_index_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  if (!std::filesystem::exists(path)) return std::nullopt;
  return read_json_file(path);
}

RetrievalDatabase load_index(const std::filesystem::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  if (manifest.value("schema_version", 0) != kIndexSchemaVersion) {
    throw Error(ErrorCode::MalformedRecord, "unsupported index schema in " + dir.string());
  }
  const std::string fingerprint = manifest.at("fingerprint").get<std::string>();
  const bool dense = manifest.at("kind").get<std::string>() == "dense";
  const std::size_t expected = manifest.at("size").get<std::size_t>();

  std::ifstream in(dir / manifest.value("vectors", std::string("vectors.jsonl")), std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open vectors of index " + dir.string());
  std::vector<RetrievalDatabase::Entry> entries;
  std::vector<Embedding> embeddings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw Error(ErrorCode::MalformedRecord, "index vectors line " + std::to_string(line_no) + ": invalid JSON");
    }
    Embedding e;
    e.fingerprint = fingerprint;
    if (dense) {
      e.kind = EmbeddingKind::dense;
      e.dense = record.at("vector").get<std::vector<float>>();
      e.norm = static_cast<float>(l2_norm(e.dense));
    } else {
      e.kind = EmbeddingKind::sparse;
      const auto indices = record.at("indices").get<std::vector<std::uint32_t>>();
      const auto values = record.at("values").get<std::vector<float>>();
      if (indices.size() != values.size()) {
        throw Error(ErrorCode::MalformedRecord, "index vectors line " + std::to_string(line_no) + ": ragged sparse row");
      }
      for (std::size_t i = 0; i < indices.size(); ++i) e.sparse.emplace_back(indices[i], values[i]);
      e.norm = static_cast<float>(l2_norm(e.sparse));
    }
    entries.push_back({record.at("id").get<std::string>(), record.value("code", std::string()),
                       record.value("comment", std::string())});
    embeddings.push_back(std::move(e));
  }
  if (entries.size() != expected) {
    throw Error(ErrorCode::MalformedRecord, "index " + dir.string() + " lists " + std::to_string(entries.size()) +
                                                " entries, manifest says " + std::to_string(expected));
  }
  return RetrievalDatabase(std::move(entries), embeddings, fingerprint);
}

}  // namespace rcg
