#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcg/corpus.hpp"
#include "rcg/embedding.hpp"
#include "rcg/http.hpp"

namespace rcg {

struct EncoderDescriptor {
  std::string name;
  /// nullopt for sparse encoders.
  std::optional<std::size_t> dimension;
  bool normalizes = true;
  /// Identity of the vocabulary or model; embeddings are comparable only when
  /// fingerprints match.
  std::string fingerprint;
};

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual const EncoderDescriptor& descriptor() const noexcept = 0;

  /// One embedding per text, in order.
  virtual std::vector<Embedding> encode_batch(std::span<const std::string> texts) const = 0;

  /// Embeddings for the code of each example. Lookup-based encoders resolve
  /// by id instead of text.
  virtual std::vector<Embedding> encode_examples(std::span<const ReviewExample> examples) const;
};

inline std::vector<Embedding> encode_batch(const Encoder& encoder, std::span<const std::string> texts) {
  return encoder.encode_batch(texts);
}

/// L2-normalized term-frequency vectors over the code vocabulary of a corpus.
/// Vocabulary order is first occurrence; out-of-vocabulary tokens are dropped.
class BowEncoder final : public Encoder {
 public:
  explicit BowEncoder(std::vector<std::string> vocabulary);

  const EncoderDescriptor& descriptor() const noexcept override { return descriptor_; }
  std::vector<Embedding> encode_batch(std::span<const std::string> texts) const override;
  Embedding encode(std::string_view text) const;

  std::span<const std::string> vocabulary() const noexcept { return vocabulary_; }
  std::optional<std::uint32_t> term_index(const std::string& token) const;

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, std::uint32_t> lookup_;
  EncoderDescriptor descriptor_;
};

BowEncoder build_bow_encoder(const Corpus& corpus);

/// Dense vectors computed offline, keyed by example id. Free text cannot be
/// encoded.
class PrecomputedEncoder final : public Encoder {
 public:
  PrecomputedEncoder(std::vector<std::string> ids, std::vector<float> rows, std::size_t dimension,
                     std::string fingerprint);

  const EncoderDescriptor& descriptor() const noexcept override { return descriptor_; }
  std::vector<Embedding> encode_batch(std::span<const std::string> texts) const override;
  std::vector<Embedding> encode_examples(std::span<const ReviewExample> examples) const override;

  Embedding lookup(const std::string& id) const;
  std::size_t size() const noexcept { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::vector<float> rows_;
  std::unordered_map<std::string, std::size_t> position_;
  EncoderDescriptor descriptor_;
};

/// Reads `{"id": str, "vector": [float, ...]}` JSONL and L2-normalizes each
/// vector.
PrecomputedEncoder load_precomputed_encoder(const std::filesystem::path& path);

struct RemoteEncoderOptions {
  std::size_t batch_size = 64;
  RetryPolicy retry;
};

/// Client for a sidecar's /embed endpoint. The descriptor (model name and
/// dimension) comes from /health at construction.
class RemoteEncoder final : public Encoder {
 public:
  RemoteEncoder(const std::string& url, RemoteEncoderOptions options = {});

  const EncoderDescriptor& descriptor() const noexcept override { return descriptor_; }
  std::vector<Embedding> encode_batch(std::span<const std::string> texts) const override;

 private:
  Endpoint endpoint_;
  RemoteEncoderOptions options_;
  EncoderDescriptor descriptor_;
};

std::unique_ptr<RemoteEncoder> remote_encoder(const std::string& url, RemoteEncoderOptions options = {});

}  // namespace rcg
