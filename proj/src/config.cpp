#include <cstdlib>
#include <fstream>

#include "rcg/hash.hpp"
#include "rcg/runner.hpp"

namespace rcg {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

CorpusSource parse_source(const json& node, const std::filesystem::path& base, Split role, const char* key) {
  CorpusSource source;
  source.split = role;
  if (node.is_string()) {
    source.path = resolve(base, node.get<std::string>());
    return source;
  }
  if (!node.is_object()) config_error(std::string("'") + key + "' must be a path or an object");
  const std::string format = node.value("format", std::string("jsonl"));
  if (node.contains("split")) {
    auto split = parse_split(node["split"].get<std::string>());
    if (!split) config_error(std::string("'") + key + ".split' must be train, valid or test");
    source.split = *split;
  }
  if (format == "jsonl") {
    if (!node.contains("path")) config_error(std::string("'") + key + "' needs a 'path'");
    source.path = resolve(base, node["path"].get<std::string>());
  } else if (format == "paired_text") {
    if (!node.contains("code") || !node.contains("comment")) {
      config_error(std::string("'") + key + "' paired_text needs 'code' and 'comment' files");
    }
    source.format = CorpusFormat::paired_text;
    source.path = resolve(base, node["code"].get<std::string>());
    source.comment_path = resolve(base, node["comment"].get<std::string>());
  } else {
    config_error(std::string("unknown corpus format '") + format + "'");
  }
  return source;
}

json source_json(const CorpusSource& source) {
  if (source.format == CorpusFormat::paired_text) {
    return {{"format", "paired_text"},
            {"code", source.path.string()},
            {"comment", source.comment_path.string()},
            {"split", to_string(source.split)}};
  }
  return {{"format", "jsonl"}, {"path", source.path.string()}, {"split", to_string(source.split)}};
}

std::uint64_t parse_threshold(const json& v) {
  if (v.is_string() && (v == "inf" || v == "∞")) return kUnboundedThreshold;
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  config_error("thresholds must be non-negative integers or \"inf\"");
}

json threshold_json(std::uint64_t t) { return t == kUnboundedThreshold ? json("inf") : json(t); }

std::size_t positive(const json& doc, const char* key, std::size_t fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number_integer() || doc[key].get<std::int64_t>() < 0) config_error(std::string("'") + key + "' must be a non-negative integer");
  return doc[key].get<std::size_t>();
}

}  // namespace

EncoderSpec EncoderSpec::parse(std::string_view spec) {
  EncoderSpec out;
  if (spec == "bow") return out;
  if (spec.starts_with("precomputed:")) {
    out.kind = Kind::precomputed;
    out.target = std::string(spec.substr(12));
  } else if (spec.starts_with("remote:")) {
    out.kind = Kind::remote;
    out.target = std::string(spec.substr(7));
  } else {
    config_error("encoder must be bow, precomputed:<path> or remote:<url>, got '" + std::string(spec) + "'");
  }
  if (out.target.empty()) config_error("encoder spec '" + std::string(spec) + "' has no target");
  return out;
}

std::string EncoderSpec::to_string() const {
  switch (kind) {
    case Kind::bow: return "bow";
    case Kind::precomputed: return "precomputed:" + target;
    case Kind::remote: return "remote:" + target;
  }
  return "bow";
}

GeneratorSpec GeneratorSpec::parse(std::string_view spec) {
  GeneratorSpec out;
  if (spec == "ir") return out;
  if (spec.starts_with("mock:")) {
    auto mode = parse_mock_mode(spec.substr(5));
    if (!mode) config_error("unknown mock mode '" + std::string(spec.substr(5)) + "'");
    out.kind = Kind::mock;
    out.mock_mode = *mode;
  } else if (spec.starts_with("remote:")) {
    out.kind = Kind::remote;
    out.url = std::string(spec.substr(7));
    if (out.url.empty()) config_error("remote generator needs a URL");
  } else {
    config_error("generator must be ir, mock:<mode> or remote:<url>, got '" + std::string(spec) + "'");
  }
  return out;
}

std::string GeneratorSpec::to_string() const {
  switch (kind) {
    case Kind::ir: return "ir";
    case Kind::mock: return "mock:" + std::string(rcg::to_string(mock_mode));
    case Kind::remote: return "remote:" + url;
  }
  return "ir";
}

void ExperimentConfig::normalize() {
  if (k == 0) strategy = AugmentationStrategy::none;
  if (budget == 0) throw Error(ErrorCode::InvalidBudget, "budget must be at least 1");
  if (max_new_tokens == 0) config_error("max_new_tokens must be at least 1");
  if (batch_size == 0) config_error("batch_size must be at least 1");
  if (eval.code_bucket == 0 || eval.comment_bucket == 0) config_error("bucket widths must be positive");
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) config_error("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (!doc.contains("train")) config_error("config needs a 'train' dataset");
    cfg.train = parse_source(doc["train"], base_dir, Split::train, "train");
    if (doc.contains("test")) cfg.test = parse_source(doc["test"], base_dir, Split::test, "test");

    cfg.encoder = EncoderSpec::parse(doc.value("encoder", std::string("bow")));
    if (cfg.encoder.kind == EncoderSpec::Kind::precomputed) {
      cfg.encoder.target = resolve(base_dir, cfg.encoder.target).string();
    } else if (cfg.encoder.kind == EncoderSpec::Kind::remote) {
      cfg.encoder.target = env_or("RCG_ENCODER_URL", cfg.encoder.target);
    }

    const std::string strategy = doc.value("strategy", std::string("pair"));
    auto parsed_strategy = parse_strategy(strategy);
    if (!parsed_strategy) config_error("strategy must be none, singleton or pair");
    cfg.strategy = *parsed_strategy;
    cfg.k = positive(doc, "k", cfg.k);
    cfg.budget = positive(doc, "budget", cfg.budget);

    cfg.generator = GeneratorSpec::parse(doc.value("generator", std::string("ir")));
    if (cfg.generator.kind == GeneratorSpec::Kind::remote) cfg.generator.url = env_or("RCG_GENERATOR_URL", cfg.generator.url);
    cfg.max_new_tokens = positive(doc, "max_new_tokens", cfg.max_new_tokens);
    cfg.decode_hint = doc.value("decode_hint", std::string());
    cfg.batch_size = positive(doc, "batch_size", cfg.batch_size);
    cfg.dedup_inference = doc.value("dedup_inference", false);

    if (doc.contains("eval")) {
      const json& e = doc["eval"];
      if (e.contains("thresholds")) {
        cfg.eval.lfgt_thresholds.clear();
        for (const json& t : e["thresholds"]) cfg.eval.lfgt_thresholds.push_back(parse_threshold(t));
      }
      cfg.eval.code_bucket = positive(e, "code_bucket", cfg.eval.code_bucket);
      cfg.eval.comment_bucket = positive(e, "comment_bucket", cfg.eval.comment_bucket);
      if (e.contains("smoothing")) {
        auto s = parse_smoothing(e["smoothing"].get<std::string>());
        if (!s) config_error("eval.smoothing must be none or add_one");
        cfg.eval.smoothing = *s;
      }
    }
    if (doc.contains("stats_thresholds")) {
      cfg.stats_thresholds.clear();
      for (const json& t : doc["stats_thresholds"]) cfg.stats_thresholds.push_back(parse_threshold(t));
    }
    if (doc.contains("k_values")) cfg.k_values = doc["k_values"].get<std::vector<std::size_t>>();
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.output_dir = resolve(base_dir, doc.value("output_dir", std::string("runs/default")));
  } catch (const json::exception& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  cfg.normalize();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) config_error(path.string() + " is not valid JSON");
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(doc, base);
}

json to_json(const ExperimentConfig& cfg) {
  json thresholds = json::array();
  for (auto t : cfg.eval.lfgt_thresholds) thresholds.push_back(threshold_json(t));
  json stats = json::array();
  for (auto t : cfg.stats_thresholds) stats.push_back(threshold_json(t));
  json doc = {
      {"train", source_json(cfg.train)},
      {"encoder", cfg.encoder.to_string()},
      {"strategy", to_string(cfg.strategy)},
      {"k", cfg.k},
      {"budget", cfg.budget},
      {"generator", cfg.generator.to_string()},
      {"max_new_tokens", cfg.max_new_tokens},
      {"decode_hint", cfg.decode_hint},
      {"batch_size", cfg.batch_size},
      {"dedup_inference", cfg.dedup_inference},
      {"eval",
       {{"thresholds", thresholds},
        {"code_bucket", cfg.eval.code_bucket},
        {"comment_bucket", cfg.eval.comment_bucket},
        {"smoothing", to_string(cfg.eval.smoothing)}}},
      {"stats_thresholds", stats},
      {"k_values", cfg.k_values},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir.string()},
  };
  if (cfg.test) doc["test"] = source_json(*cfg.test);
  return doc;
}

std::string config_hash(const ExperimentConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("output_dir");
  if (cfg.encoder.kind == EncoderSpec::Kind::remote) doc["encoder"] = "remote";
  if (cfg.generator.kind == GeneratorSpec::Kind::remote) doc["generator"] = "remote";
  return sha256_hex(doc.dump());
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidBudget:
    case ErrorCode::InvalidThresholds:
      return 2;
    case ErrorCode::EncoderUnavailable:
    case ErrorCode::GeneratorUnavailable:
    case ErrorCode::ProtocolViolation:
      return 4;
    default:
      return 3;
  }
}

}  // namespace rcg
