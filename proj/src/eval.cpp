#include <algorithm>
#include <set>

#include "rcg/error.hpp"
#include "rcg/eval.hpp"

namespace rcg {

using nlohmann::json;

namespace {

void check_aligned(std::size_t candidates, std::size_t references) {
  if (candidates != references) {
    throw Error(ErrorCode::AlignmentError, std::to_string(candidates) + " candidates vs " +
                                               std::to_string(references) + " references");
  }
  if (candidates == 0) throw Error(ErrorCode::EmptyInput, "nothing to score");
}

}  // namespace

std::string normalize_for_match(std::string_view text) { return collapse_whitespace(nfc(text)); }

double exact_match(std::span<const std::string> candidates, std::span<const std::string> references) {
  check_aligned(candidates.size(), references.size());
  std::size_t equal = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (normalize_for_match(candidates[i]) == normalize_for_match(references[i])) ++equal;
  }
  return 100.0 * static_cast<double>(equal) / static_cast<double>(candidates.size());
}

double exact_match_strict(std::span<const std::string> candidates, std::span<const std::string> references) {
  check_aligned(candidates.size(), references.size());
  std::size_t equal = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == references[i]) ++equal;
  }
  return 100.0 * static_cast<double>(equal) / static_cast<double>(candidates.size());
}

std::optional<double> improvement_pct(std::uint64_t baseline, std::uint64_t treatment) {
  if (baseline == 0) return std::nullopt;
  return 100.0 * (static_cast<double>(treatment) - static_cast<double>(baseline)) / static_cast<double>(baseline);
}

LfgtReport lfgt_analysis(std::span<const std::string> candidates, std::span<const std::string> references,
                         const FrequencyTable& frequencies, std::span<const std::uint64_t> thresholds,
                         std::optional<std::span<const std::uint64_t>> baseline_counts) {
  check_aligned(candidates.size(), references.size());
  validate_thresholds(thresholds);

  LfgtReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  report.counts.assign(thresholds.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const TokenSequence cand = tokenize(candidates[i]);
    const TokenSequence ref = tokenize(references[i]);
    const std::set<std::string> cand_set(cand.begin(), cand.end());
    const std::set<std::string> ref_set(ref.begin(), ref.end());
    std::vector<std::string> shared;
    std::set_intersection(cand_set.begin(), cand_set.end(), ref_set.begin(), ref_set.end(),
                          std::back_inserter(shared));
    for (const std::string& token : shared) {
      const std::uint64_t freq = frequencies.count(token);
      // thresholds ascend, so a token counts toward a suffix of them
      const auto first = std::lower_bound(thresholds.begin(), thresholds.end(), freq);
      for (auto t = first; t != thresholds.end(); ++t) ++report.counts[static_cast<std::size_t>(t - thresholds.begin())];
    }
  }

  if (baseline_counts) {
    if (baseline_counts->size() != thresholds.size()) {
      throw Error(ErrorCode::AlignmentError, "baseline counts must have one entry per threshold");
    }
    report.baseline_counts.emplace(baseline_counts->begin(), baseline_counts->end());
    report.improvement_pct.emplace();
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      report.improvement_pct->push_back(improvement_pct((*baseline_counts)[t], report.counts[t]));
    }
  }
  return report;
}

LengthBucketReport length_bucket_report(std::span<const LengthInstance> instances, std::size_t code_bucket,
                                        std::size_t comment_bucket) {
  if (instances.empty()) throw Error(ErrorCode::EmptyInput, "no instances to bucket");
  if (code_bucket == 0 || comment_bucket == 0) throw Error(ErrorCode::InvalidArgument, "bucket width must be positive");

  LengthBucketReport report;
  report.code_width = code_bucket;
  report.comment_width = comment_bucket;
  std::map<std::size_t, double> code_sums;
  std::map<std::size_t, double> comment_sums;
  for (const LengthInstance& inst : instances) {
    const TokenSequence reference = tokenize(inst.reference);
    const double score = bleu4(tokenize(inst.candidate), reference, Smoothing::add_one).score;
    const std::size_t code_key = count_tokens(inst.code) / code_bucket * code_bucket;
    const std::size_t comment_key = reference.size() / comment_bucket * comment_bucket;
    code_sums[code_key] += score;
    ++report.by_code_length[code_key].instances;
    comment_sums[comment_key] += score;
    ++report.by_comment_length[comment_key].instances;
  }
  for (auto& [key, bucket] : report.by_code_length) bucket.mean_bleu = code_sums[key] / static_cast<double>(bucket.instances);
  for (auto& [key, bucket] : report.by_comment_length) {
    bucket.mean_bleu = comment_sums[key] / static_cast<double>(bucket.instances);
  }
  return report;
}

EvalReport evaluate(std::span<const LengthInstance> instances, const FrequencyTable& training_comments,
                    const EvalOptions& options) {
  if (instances.empty()) throw Error(ErrorCode::EmptyInput, "no instances to evaluate");
  std::vector<std::string> candidates;
  std::vector<std::string> references;
  std::vector<TextPair> pairs;
  for (const LengthInstance& inst : instances) {
    candidates.push_back(inst.candidate);
    references.push_back(inst.reference);
    pairs.push_back({inst.candidate, inst.reference});
  }

  EvalReport report;
  report.n_instances = instances.size();
  report.em_pct = exact_match(candidates, references);
  report.em_strict_pct = exact_match_strict(candidates, references);
  report.bleu = sentence_bleu_average(pairs, options.smoothing);
  report.corpus_bleu = corpus_bleu4(pairs);
  report.lfgt = lfgt_analysis(candidates, references, training_comments, options.lfgt_thresholds);
  report.length_buckets = length_bucket_report(instances, options.code_bucket, options.comment_bucket);
  return report;
}

json to_json(const BleuReport& report) {
  return {{"score", report.score},
          {"precisions", report.precisions},
          {"brevity_penalty", report.brevity_penalty},
          {"candidate_length", report.candidate_length},
          {"reference_length", report.reference_length},
          {"mode", to_string(report.mode)}};
}

json to_json(const LfgtReport& report) {
  json out = {{"thresholds", report.thresholds}, {"counts", report.counts}};
  if (report.baseline_counts) out["baseline_counts"] = *report.baseline_counts;
  if (report.improvement_pct) {
    json pct = json::array();
    for (const auto& v : *report.improvement_pct) pct.push_back(v ? json(*v) : json(nullptr));
    out["improvement_pct"] = std::move(pct);
  }
  return out;
}

namespace {

json buckets_json(const std::map<std::size_t, BucketMean>& buckets, std::size_t width) {
  json out = json::array();
  for (const auto& [lower, bucket] : buckets) {
    out.push_back({{"range", "[" + std::to_string(lower) + "," + std::to_string(lower + width) + ")"},
                   {"lower", lower},
                   {"instances", bucket.instances},
                   {"mean_bleu", bucket.mean_bleu}});
  }
  return out;
}

}  // namespace

json to_json(const LengthBucketReport& report) {
  return {{"code_width", report.code_width},
          {"comment_width", report.comment_width},
          {"by_code_length", buckets_json(report.by_code_length, report.code_width)},
          {"by_comment_length", buckets_json(report.by_comment_length, report.comment_width)}};
}

json to_json(const EvalReport& report) {
  return {{"n_instances", report.n_instances},
          {"em_pct", report.em_pct},
          {"em_strict_pct", report.em_strict_pct},
          {"bleu", to_json(report.bleu)},
          {"corpus_bleu", to_json(report.corpus_bleu)},
          {"lfgt", to_json(report.lfgt)},
          {"length_buckets", to_json(report.length_buckets)}};
}

}  // namespace rcg
