#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rcg/corpus.hpp"
#include "rcg/error.hpp"
#include "rcg/eval.hpp"
#include "rcg/generate.hpp"
#include "rcg/prompt.hpp"

namespace rcg {

inline constexpr int kReportSchemaVersion = 1;

struct EncoderSpec {
  enum class Kind { bow, precomputed, remote };
  Kind kind = Kind::bow;
  std::string target;  // vector file path or endpoint URL

  static EncoderSpec parse(std::string_view spec);
  std::string to_string() const;
};

struct GeneratorSpec {
  enum class Kind { ir, mock, remote };
  Kind kind = Kind::ir;
  MockMode mock_mode = MockMode::fixed;
  std::string url;

  static GeneratorSpec parse(std::string_view spec);
  std::string to_string() const;
};

/// One experiment, as read from a JSON config file. Relative paths are
/// resolved against the config file's directory.
struct ExperimentConfig {
  CorpusSource train;
  std::optional<CorpusSource> test;
  EncoderSpec encoder;
  AugmentationStrategy strategy = AugmentationStrategy::pair;
  std::size_t k = 1;
  std::size_t budget = kDefaultInputBudget;
  GeneratorSpec generator;
  std::size_t max_new_tokens = kDefaultMaxNewTokens;
  std::string decode_hint;
  std::size_t batch_size = 16;
  bool dedup_inference = false;
  EvalOptions eval;
  std::vector<std::uint64_t> stats_thresholds = {1, 5, 10, 20, 50, 100, kUnboundedThreshold};
  std::vector<std::size_t> k_values = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t seed = 0;  // reserved; the pipeline is deterministic
  std::filesystem::path output_dir = "runs/default";

  /// Enforces k = 0 => strategy none and other field constraints.
  void normalize();
};

/// Parses a config document. RCG_ENCODER_URL / RCG_GENERATOR_URL override the
/// endpoint of a remote encoder / generator.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical form; paths are absolute.
nlohmann::json to_json(const ExperimentConfig& config);

/// SHA-256 of the canonical config without the output directory and endpoint
/// URLs.
std::string config_hash(const ExperimentConfig& config);

struct RunManifest {
  std::string config_hash;
  std::string encoder_fingerprint;
  std::string started_at;
  std::string finished_at;
  std::string status;  // "ok" | "failed"
  std::string error;
  std::vector<std::pair<std::string, std::filesystem::path>> artifacts;

  nlohmann::json to_json() const;
};

RunManifest cmd_index(const ExperimentConfig& config);

struct RunResult {
  EvalReport report;
  nlohmann::json report_json;
  RunManifest manifest;
};

RunResult cmd_run(const ExperimentConfig& config);

struct SweepResult {
  std::vector<std::size_t> k_values;
  std::vector<RunResult> runs;
  nlohmann::json table;
};

SweepResult cmd_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& k_values);

struct StatsResult {
  std::size_t n_examples = 0;
  std::uint64_t total_tokens = 0;
  std::size_t unique_tokens = 0;
  std::vector<BucketStat> buckets;
  nlohmann::json json;
};

StatsResult cmd_stats(const ExperimentConfig& config);

/// Writes retrieval.jsonl (test query -> neighbors) under the output directory.
RunManifest cmd_retrieve(const ExperimentConfig& config);

/// Writes prompts.jsonl under the output directory.
RunManifest cmd_prompt(const ExperimentConfig& config);

/// 2 config error, 3 data error, 4 backend unavailable.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace rcg
