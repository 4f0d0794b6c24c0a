#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "rcg/error.hpp"
#include "rcg/eval.hpp"

namespace rcg {

std::optional<Smoothing> parse_smoothing(std::string_view name) noexcept {
  if (name == "none") return Smoothing::none;
  if (name == "add_one") return Smoothing::add_one;
  return std::nullopt;
}

std::string_view to_string(Smoothing smoothing) noexcept {
  return smoothing == Smoothing::none ? "none" : "add_one";
}

std::string_view to_string(BleuMode mode) noexcept {
  return mode == BleuMode::corpus ? "corpus" : "sentence_avg";
}

NgramStats& NgramStats::operator+=(const NgramStats& other) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += other.matches[n];
    candidate_ngrams[n] += other.candidate_ngrams[n];
    reference_ngrams[n] += other.reference_ngrams[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

namespace {

using Ngram = std::vector<std::uint32_t>;

std::map<Ngram, std::uint64_t> count_ngrams(const std::vector<std::uint32_t>& ids, std::size_t n) {
  std::map<Ngram, std::uint64_t> counts;
  for (std::size_t i = 0; i + n <= ids.size(); ++i) ++counts[Ngram(ids.begin() + i, ids.begin() + i + n)];
  return counts;
}

}  // namespace

NgramStats ngram_stats(std::span<const std::string> candidate, std::span<const std::string> reference) {
  std::unordered_map<std::string_view, std::uint32_t> vocab;
  auto intern = [&](std::span<const std::string> tokens) {
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& t : tokens) {
      ids.push_back(vocab.emplace(t, static_cast<std::uint32_t>(vocab.size())).first->second);
    }
    return ids;
  };
  const std::vector<std::uint32_t> cand = intern(candidate);
  const std::vector<std::uint32_t> ref = intern(reference);

  NgramStats stats;
  stats.candidate_length = cand.size();
  stats.reference_length = ref.size();
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const auto cand_counts = count_ngrams(cand, n);
    const auto ref_counts = count_ngrams(ref, n);
    std::uint64_t matched = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.candidate_ngrams[n - 1] = cand.size() >= n ? cand.size() - n + 1 : 0;
    stats.reference_ngrams[n - 1] = ref.size() >= n ? ref.size() - n + 1 : 0;
  }
  return stats;
}

BleuReport bleu_from_stats(const NgramStats& stats, Smoothing smoothing) {
  BleuReport report;
  report.candidate_length = stats.candidate_length;
  report.reference_length = stats.reference_length;

  bool any_zero = false;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    const double matched = static_cast<double>(stats.matches[n]);
    const double total = static_cast<double>(stats.candidate_ngrams[n]);
    double p;
    if (stats.candidate_ngrams[n] == 0 && stats.reference_ngrams[n] == 0) {
      p = 1.0;
    } else if (stats.matches[n] == 0) {
      p = (smoothing == Smoothing::add_one && n >= 1) ? 1.0 / (total + 1.0) : 0.0;
    } else {
      p = matched / total;
    }
    report.precisions[n] = p;
    if (p == 0.0) {
      any_zero = true;
    } else {
      log_sum += std::log(p) / kBleuOrder;
    }
  }

  if (stats.candidate_length == 0) {
    report.brevity_penalty = 0.0;
    report.score = 0.0;
    return report;
  }
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  report.brevity_penalty = c < r ? std::exp(1.0 - r / c) : 1.0;
  report.score = any_zero ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum);
  return report;
}

BleuReport bleu4(std::span<const std::string> candidate, std::span<const std::string> reference,
                 Smoothing smoothing) {
  if (reference.empty()) throw Error(ErrorCode::EmptyReference, "BLEU needs a non-empty reference");
  BleuReport report = bleu_from_stats(ngram_stats(candidate, reference), smoothing);
  report.mode = BleuMode::sentence_avg;
  return report;
}

BleuReport corpus_bleu4(std::span<const TextPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "corpus BLEU needs at least one pair");
  NgramStats total;
  for (const TextPair& pair : pairs) {
    const TokenSequence ref = tokenize(pair.reference);
    if (ref.empty()) throw Error(ErrorCode::EmptyReference, "BLEU needs a non-empty reference");
    total += ngram_stats(tokenize(pair.candidate), ref);
  }
  BleuReport report = bleu_from_stats(total, Smoothing::none);
  report.mode = BleuMode::corpus;
  return report;
}

BleuReport sentence_bleu_average(std::span<const TextPair> pairs, Smoothing smoothing) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "sentence BLEU needs at least one pair");
  BleuReport mean;
  mean.mode = BleuMode::sentence_avg;
  for (const TextPair& pair : pairs) {
    const BleuReport r = bleu4(tokenize(pair.candidate), tokenize(pair.reference), smoothing);
    mean.score += r.score;
    for (int n = 0; n < kBleuOrder; ++n) mean.precisions[n] += r.precisions[n];
    mean.brevity_penalty += r.brevity_penalty;
    mean.candidate_length += r.candidate_length;
    mean.reference_length += r.reference_length;
  }
  const double count = static_cast<double>(pairs.size());
  mean.score /= count;
  for (double& p : mean.precisions) p /= count;
  mean.brevity_penalty /= count;
  return mean;
}

}  // namespace rcg
