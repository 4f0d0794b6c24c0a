#include "rcg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rcg/error.hpp"
#include "rcg/tokenizer.hpp"

namespace rcg {
namespace {

using nlohmann::json;

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

// Whitespace-only fields count as empty. Unicode spaces are caught through the
// tokenizer's whitespace class.
bool empty_after_trim(std::string_view s) { return blank(s) || collapse_whitespace(s).empty(); }

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string malformed_at(const std::filesystem::path& path, std::size_t line, std::string_view what) {
  return path.string() + ":" + std::to_string(line) + ": " + std::string(what);
}

std::string required_string(const json& record, const char* key, const std::filesystem::path& path,
                            std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedRecord,
                malformed_at(path, line, std::string("missing string field '") + key + "'"));
  }
  std::string value = it->get<std::string>();
  if (empty_after_trim(value)) {
    throw Error(ErrorCode::MalformedRecord,
                malformed_at(path, line, std::string("empty field '") + key + "'"));
  }
  return value;
}

}  // namespace

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view name) noexcept {
  if (name == "train") return Split::train;
  if (name == "valid") return Split::valid;
  if (name == "test") return Split::test;
  return std::nullopt;
}

Corpus::Corpus(std::vector<ReviewExample> examples) : examples_(std::move(examples)) {
  index_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const ReviewExample& ex = examples_[i];
    if (ex.id.empty()) {
      throw Error(ErrorCode::MalformedRecord, "record " + std::to_string(i) + ": empty id");
    }
    if (empty_after_trim(ex.code) || empty_after_trim(ex.comment)) {
      throw Error(ErrorCode::MalformedRecord, "record '" + ex.id + "': empty code or comment");
    }
    if (!index_.emplace(ex.id, i).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + ex.id + "'");
    }
  }
}

const ReviewExample* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &examples_[it->second];
}

Corpus Corpus::filter(Split split) const {
  std::vector<ReviewExample> kept;
  for (const ReviewExample& ex : examples_) {
    if (ex.split == split) kept.push_back(ex);
  }
  return Corpus(std::move(kept));
}

Corpus load_jsonl(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<ReviewExample> examples;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(ErrorCode::MalformedRecord, malformed_at(path, line_no, "not a JSON object"));
    }
    ReviewExample ex;
    auto id_it = record.find("id");
    if (id_it != record.end() && id_it->is_number_integer()) {
      ex.id = std::to_string(id_it->get<long long>());
    } else {
      ex.id = required_string(record, "id", path, line_no);
    }
    ex.code = required_string(record, "code", path, line_no);
    ex.comment = required_string(record, "comment", path, line_no);
    const std::string split = required_string(record, "split", path, line_no);
    auto parsed = parse_split(split);
    if (!parsed) {
      throw Error(ErrorCode::MalformedRecord, malformed_at(path, line_no, "unknown split '" + split + "'"));
    }
    ex.split = *parsed;
    if (auto [it, inserted] = first_seen.emplace(ex.id, line_no); !inserted) {
      throw Error(ErrorCode::DuplicateId, malformed_at(path, line_no, "duplicate id '" + ex.id +
                                                                         "' (first on line " +
                                                                         std::to_string(it->second) + ")"));
    }
    examples.push_back(std::move(ex));
  }
  return Corpus(std::move(examples));
}

Corpus load_paired_text(const std::filesystem::path& code_path,
                        const std::filesystem::path& comment_path, Split split) {
  std::vector<std::string> codes = read_lines(code_path);
  std::vector<std::string> comments = read_lines(comment_path);
  if (codes.size() != comments.size()) {
    throw Error(ErrorCode::AlignmentError, code_path.string() + " has " + std::to_string(codes.size()) +
                                               " lines but " + comment_path.string() + " has " +
                                               std::to_string(comments.size()));
  }
  const std::size_t width = std::max<std::size_t>(6, std::to_string(codes.size()).size());
  std::vector<ReviewExample> examples;
  examples.reserve(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (empty_after_trim(codes[i])) {
      throw Error(ErrorCode::MalformedRecord, malformed_at(code_path, i + 1, "empty code"));
    }
    if (empty_after_trim(comments[i])) {
      throw Error(ErrorCode::MalformedRecord, malformed_at(comment_path, i + 1, "empty comment"));
    }
    std::string id = std::to_string(i);
    id.insert(0, width - id.size(), '0');
    examples.push_back({std::move(id), std::move(codes[i]), std::move(comments[i]), split});
  }
  return Corpus(std::move(examples));
}

Corpus load_corpus(const CorpusSource& source) {
  if (source.format == CorpusFormat::paired_text) {
    return load_paired_text(source.path, source.comment_path, source.split);
  }
  return load_jsonl(source.path);
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const ReviewExample& ex : corpus) {
    json record = {{"id", ex.id}, {"code", ex.code}, {"comment", ex.comment}, {"split", to_string(ex.split)}};
    out << record.dump() << '\n';
  }
}

FrequencyTable::FrequencyTable(std::unordered_map<std::string, std::uint64_t> counts, Field field)
    : counts_(std::move(counts)), field_(field) {
  for (const auto& [token, n] : counts_) total_tokens_ += n;
}

std::uint64_t FrequencyTable::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> FrequencyTable::sorted() const {
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts_.begin(), counts_.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return rows;
}

namespace {
const std::string& field_of(const ReviewExample& ex, Field field) {
  return field == Field::comment ? ex.comment : ex.code;
}
}  // namespace

FrequencyTable build_frequency_table(const Corpus& corpus, Field field) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot count tokens of an empty corpus");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const ReviewExample& ex : corpus) {
    for (std::string& token : tokenize(field_of(ex, field))) ++counts[std::move(token)];
  }
  return FrequencyTable(std::move(counts), field);
}

void validate_thresholds(std::span<const std::uint64_t> thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::InvalidThresholds, "no thresholds given");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] <= thresholds[i - 1]) {
      throw Error(ErrorCode::InvalidThresholds, "thresholds must be strictly increasing");
    }
  }
}

std::vector<BucketStat> frequency_bucket_stats(const FrequencyTable& table, const Corpus& corpus,
                                               std::span<const std::uint64_t> thresholds) {
  validate_thresholds(thresholds);

  std::vector<std::uint64_t> frequencies;
  frequencies.reserve(table.unique_tokens());
  for (const auto& [token, n] : table.counts()) frequencies.push_back(n);
  std::sort(frequencies.begin(), frequencies.end());

  // An example contributes to every threshold at or above its rarest token.
  std::vector<std::uint64_t> rarest;
  rarest.reserve(corpus.size());
  for (const ReviewExample& ex : corpus) {
    TokenSequence tokens = tokenize(field_of(ex, table.field()));
    if (tokens.empty()) continue;
    std::uint64_t lowest = kUnboundedThreshold;
    for (const std::string& token : tokens) lowest = std::min(lowest, table.count(token));
    rarest.push_back(lowest);
  }
  std::sort(rarest.begin(), rarest.end());

  std::vector<BucketStat> stats;
  stats.reserve(thresholds.size());
  for (std::uint64_t x : thresholds) {
    auto tokens_end = std::upper_bound(frequencies.begin(), frequencies.end(), x);
    auto examples_end = std::upper_bound(rarest.begin(), rarest.end(), x);
    stats.push_back({x, static_cast<std::size_t>(tokens_end - frequencies.begin()),
                     static_cast<std::size_t>(examples_end - rarest.begin())});
  }
  return stats;
}

}  // namespace rcg
