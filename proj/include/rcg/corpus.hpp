#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rcg {

enum class Split { train, valid, test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view name) noexcept;

struct ReviewExample {
  std::string id;
  std::string code;
  std::string comment;
  Split split = Split::train;

  bool operator==(const ReviewExample&) const = default;
};

/// Ordered, id-indexed collection of validated review examples. Immutable once
/// built; iteration order is insertion (load) order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<ReviewExample> examples);

  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }

  const ReviewExample& operator[](std::size_t i) const { return examples_[i]; }
  std::span<const ReviewExample> examples() const noexcept { return examples_; }
  auto begin() const noexcept { return examples_.begin(); }
  auto end() const noexcept { return examples_.end(); }

  const ReviewExample* find(std::string_view id) const;

  Corpus filter(Split split) const;

  bool operator==(const Corpus& other) const { return examples_ == other.examples_; }

 private:
  std::vector<ReviewExample> examples_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { jsonl, paired_text };

/// Where to read a corpus from. For paired_text, `path` is the code file and
/// `comment_path` the line-aligned comment file; `split` labels every record.
struct CorpusSource {
  CorpusFormat format = CorpusFormat::jsonl;
  std::filesystem::path path;
  std::filesystem::path comment_path;
  Split split = Split::train;
};

Corpus load_jsonl(const std::filesystem::path& path);
Corpus load_paired_text(const std::filesystem::path& code_path,
                        const std::filesystem::path& comment_path, Split split);
Corpus load_corpus(const CorpusSource& source);

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

enum class Field { comment, code };

class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(std::unordered_map<std::string, std::uint64_t> counts, Field field);

  std::uint64_t count(const std::string& token) const;
  const std::unordered_map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t unique_tokens() const noexcept { return counts_.size(); }
  Field field() const noexcept { return field_; }

  /// (token, count) sorted by count descending, then token ascending.
  std::vector<std::pair<std::string, std::uint64_t>> sorted() const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_tokens_ = 0;
  Field field_ = Field::comment;
};

FrequencyTable build_frequency_table(const Corpus& corpus, Field field = Field::comment);

inline constexpr std::uint64_t kUnboundedThreshold = std::numeric_limits<std::uint64_t>::max();

struct BucketStat {
  std::uint64_t threshold = 0;
  std::size_t unique_tokens = 0;
  std::size_t examples_containing = 0;
};

/// For every threshold x: tokens with frequency <= x, and the number of
/// examples whose selected field holds at least one of them.
std::vector<BucketStat> frequency_bucket_stats(const FrequencyTable& table, const Corpus& corpus,
                                               std::span<const std::uint64_t> thresholds);

void validate_thresholds(std::span<const std::uint64_t> thresholds);

}  // namespace rcg
