#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcg/corpus.hpp"
#include "rcg/tokenizer.hpp"

namespace rcg {

// ---------------------------------------------------------------------------
// BLEU-4

inline constexpr int kBleuOrder = 4;

enum class Smoothing { none, add_one };
enum class BleuMode { sentence_avg, corpus };

std::optional<Smoothing> parse_smoothing(std::string_view name) noexcept;
std::string_view to_string(Smoothing smoothing) noexcept;
std::string_view to_string(BleuMode mode) noexcept;

/// Clipped n-gram match counts for orders 1..4 plus lengths. Sums of these
/// over sentences are the corpus-level statistics.
struct NgramStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> candidate_ngrams{};
  std::array<std::uint64_t, kBleuOrder> reference_ngrams{};
  std::uint64_t candidate_length = 0;
  std::uint64_t reference_length = 0;

  NgramStats& operator+=(const NgramStats& other);
};

NgramStats ngram_stats(std::span<const std::string> candidate, std::span<const std::string> reference);

struct BleuReport {
  double score = 0.0;  // [0, 100]
  std::array<double, kBleuOrder> precisions{};
  double brevity_penalty = 0.0;
  std::uint64_t candidate_length = 0;
  std::uint64_t reference_length = 0;
  BleuMode mode = BleuMode::sentence_avg;
};

/// Uniform weights 1/4, BP = exp(1 - r/c) for c < r. An order with no n-grams
/// on either side (both sequences shorter than n) has precision 1. add_one
/// smoothing replaces a zero match count for n >= 2 by (0 + 1) / (total + 1).
/// Without smoothing any zero precision gives score 0. An empty candidate
/// scores 0 with brevity penalty 0.
BleuReport bleu_from_stats(const NgramStats& stats, Smoothing smoothing);

BleuReport bleu4(std::span<const std::string> candidate, std::span<const std::string> reference,
                 Smoothing smoothing = Smoothing::add_one);

struct TextPair {
  std::string candidate;
  std::string reference;
};

/// Pooled statistics over all pairs with one brevity penalty; no smoothing.
BleuReport corpus_bleu4(std::span<const TextPair> pairs);

/// Mean of per-sentence bleu4 in input order; lengths are summed.
BleuReport sentence_bleu_average(std::span<const TextPair> pairs, Smoothing smoothing);

// ---------------------------------------------------------------------------
// Exact match

/// NFC, trimmed, internal whitespace runs collapsed to one space.
std::string normalize_for_match(std::string_view text);

/// Percentage of pairs equal after normalize_for_match.
double exact_match(std::span<const std::string> candidates, std::span<const std::string> references);

/// Percentage of byte-identical pairs.
double exact_match_strict(std::span<const std::string> candidates, std::span<const std::string> references);

// ---------------------------------------------------------------------------
// Low-frequency ground-truth tokens

inline const std::vector<std::uint64_t> kDefaultLfgtThresholds = {20, 40, 60, 80, 100};

struct LfgtReport {
  std::vector<std::uint64_t> thresholds;
  std::vector<std::uint64_t> counts;
  std::optional<std::vector<std::uint64_t>> baseline_counts;
  /// Per threshold; nullopt where the baseline count is 0.
  std::optional<std::vector<std::optional<double>>> improvement_pct;
};

std::optional<double> improvement_pct(std::uint64_t baseline, std::uint64_t treatment);

/// Per instance, the distinct tokens shared by candidate and reference; a
/// shared token counts toward threshold x when its training frequency is <= x
/// (unseen tokens have frequency 0).
LfgtReport lfgt_analysis(std::span<const std::string> candidates, std::span<const std::string> references,
                         const FrequencyTable& frequencies, std::span<const std::uint64_t> thresholds,
                         std::optional<std::span<const std::uint64_t>> baseline_counts = std::nullopt);

// ---------------------------------------------------------------------------
// Length buckets

struct LengthInstance {
  std::string code;
  std::string candidate;
  std::string reference;
};

struct BucketMean {
  std::size_t instances = 0;
  double mean_bleu = 0.0;
};

struct LengthBucketReport {
  std::size_t code_width = 20;
  std::size_t comment_width = 10;
  /// Keyed by bucket lower bound; bucket k covers [k*w, (k+1)*w).
  std::map<std::size_t, BucketMean> by_code_length;
  std::map<std::size_t, BucketMean> by_comment_length;
};

LengthBucketReport length_bucket_report(std::span<const LengthInstance> instances, std::size_t code_bucket = 20,
                                        std::size_t comment_bucket = 10);

// ---------------------------------------------------------------------------
// Full report

struct EvalOptions {
  std::vector<std::uint64_t> lfgt_thresholds = kDefaultLfgtThresholds;
  std::size_t code_bucket = 20;
  std::size_t comment_bucket = 10;
  Smoothing smoothing = Smoothing::add_one;
};

struct EvalReport {
  std::size_t n_instances = 0;
  double em_pct = 0.0;
  double em_strict_pct = 0.0;
  BleuReport bleu;         // sentence average, the headline number
  BleuReport corpus_bleu;
  LfgtReport lfgt;
  LengthBucketReport length_buckets;
};

EvalReport evaluate(std::span<const LengthInstance> instances, const FrequencyTable& training_comments,
                    const EvalOptions& options = {});

nlohmann::json to_json(const BleuReport& report);
nlohmann::json to_json(const LfgtReport& report);
nlohmann::json to_json(const LengthBucketReport& report);
nlohmann::json to_json(const EvalReport& report);

}  // namespace rcg
