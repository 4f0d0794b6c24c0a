#include <algorithm>

#include "rcg/encoder.hpp"
#include "rcg/error.hpp"
#include "rcg/hash.hpp"

namespace rcg {

using nlohmann::json;

RemoteEncoder::RemoteEncoder(const std::string& url, RemoteEncoderOptions options)
    : endpoint_(Endpoint::parse(url)), options_(options) {
  if (options_.batch_size == 0) throw Error(ErrorCode::ConfigError, "encoder batch size must be positive");
  const json health = get_json(endpoint_, "/health", options_.retry, ErrorCode::EncoderUnavailable);
  if (!health.contains("dimension") || !health["dimension"].is_number_unsigned() ||
      health["dimension"].get<std::size_t>() == 0) {
    throw Error(ErrorCode::ProtocolViolation, endpoint_.url() + "/health does not advertise a dimension");
  }
  const std::size_t dimension = health["dimension"].get<std::size_t>();
  const std::string model = health.value("embed_model", json()).is_string() ? health["embed_model"].get<std::string>() : "";
  const std::string pooling = health.value("pooling", json()).is_string() ? health["pooling"].get<std::string>() : "";
  const std::string fingerprint = Sha256()
                                      .update("remote-v1\n")
                                      .update(model + "\n" + std::to_string(dimension) + "\n" + pooling)
                                      .hex();
  descriptor_ = {"remote:" + model, dimension, true, "remote:" + fingerprint};
}

std::vector<Embedding> RemoteEncoder::encode_batch(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  const std::size_t dim = *descriptor_.dimension;
  for (std::size_t begin = 0; begin < texts.size(); begin += options_.batch_size) {
    const std::size_t end = std::min(texts.size(), begin + options_.batch_size);
    json request = {{"texts", json::array()}};
    for (std::size_t i = begin; i < end; ++i) request["texts"].push_back(texts[i]);

    const json reply = post_json(endpoint_, "/embed", request, options_.retry, ErrorCode::EncoderUnavailable);
    if (!reply.contains("vectors") || !reply["vectors"].is_array() || reply["vectors"].size() != end - begin) {
      throw Error(ErrorCode::ProtocolViolation, "/embed returned the wrong number of vectors");
    }
    for (const json& vector : reply["vectors"]) {
      if (!vector.is_array() || vector.size() != dim) {
        throw Error(ErrorCode::ProtocolViolation, "/embed returned a vector of dimension " +
                                                      std::to_string(vector.is_array() ? vector.size() : 0) +
                                                      ", expected " + std::to_string(dim));
      }
      Embedding e;
      e.kind = EmbeddingKind::dense;
      e.fingerprint = descriptor_.fingerprint;
      e.dense.reserve(dim);
      for (const json& v : vector) {
        if (!v.is_number()) throw Error(ErrorCode::ProtocolViolation, "/embed returned a non-numeric component");
        e.dense.push_back(v.get<float>());
      }
      if (!all_finite(e.dense)) throw Error(ErrorCode::ProtocolViolation, "/embed returned a non-finite component");
      e.norm = normalize(e.dense);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::unique_ptr<RemoteEncoder> remote_encoder(const std::string& url, RemoteEncoderOptions options) {
  return std::make_unique<RemoteEncoder>(url, options);
}

}  // namespace rcg
