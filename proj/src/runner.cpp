#include "rcg/runner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "rcg/encoder.hpp"
#include "rcg/hash.hpp"
#include "rcg/index.hpp"

namespace rcg {

using nlohmann::json;

namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

Corpus load_role(const CorpusSource& source) {
  Corpus corpus = load_corpus(source);
  if (source.format == CorpusFormat::jsonl) corpus = corpus.filter(source.split);
  if (corpus.empty()) {
    throw Error(ErrorCode::EmptyCorpus,
                source.path.string() + " has no '" + std::string(to_string(source.split)) + "' records");
  }
  return corpus;
}

Corpus load_test(const ExperimentConfig& cfg) {
  if (!cfg.test) throw Error(ErrorCode::ConfigError, "config has no 'test' dataset");
  return load_role(*cfg.test);
}

std::string corpus_digest(const Corpus& corpus) {
  Sha256 hash;
  for (const ReviewExample& ex : corpus) {
    for (const std::string* field : {&ex.id, &ex.code, &ex.comment}) {
      const std::uint64_t size = field->size();
      hash.update(&size, sizeof size).update(*field);
    }
  }
  return hash.hex();
}

std::unique_ptr<Encoder> make_encoder(const ExperimentConfig& cfg, const Corpus& train) {
  switch (cfg.encoder.kind) {
    case EncoderSpec::Kind::bow: return std::make_unique<BowEncoder>(build_bow_encoder(train));
    case EncoderSpec::Kind::precomputed:
      return std::make_unique<PrecomputedEncoder>(load_precomputed_encoder(cfg.encoder.target));
    case EncoderSpec::Kind::remote: {
      RemoteEncoderOptions options;
      options.batch_size = std::max<std::size_t>(cfg.batch_size, 1);
      return remote_encoder(cfg.encoder.target, options);
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown encoder");
}

/// Reuses a saved index when its fingerprint and training corpus digest match.
RetrievalDatabase obtain_index(const Corpus& train, const Encoder& encoder, const std::filesystem::path& dir) {
  const std::string digest = corpus_digest(train);
  if (auto manifest = read_index_manifest(dir)) {
    if (manifest->value("fingerprint", std::string()) == encoder.descriptor().fingerprint &&
        manifest->value("corpus_digest", std::string()) == digest) {
      return load_index(dir);
    }
  }
  RetrievalDatabase db = build_index(train, encoder);
  save_index(db, dir, encoder.descriptor().name, {{"corpus_digest", digest}});
  return db;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / 32));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Pipeline {
  Corpus train;
  Corpus test;
  std::unique_ptr<Encoder> encoder;
  std::optional<RetrievalDatabase> db;
};

Pipeline prepare(const ExperimentConfig& cfg, bool need_test) {
  Pipeline p;
  p.train = load_role(cfg.train);
  if (need_test) p.test = load_test(cfg);
  p.encoder = make_encoder(cfg, p.train);
  p.db.emplace(obtain_index(p.train, *p.encoder, cfg.output_dir / "index"));
  return p;
}

/// Retrieval for every test query; all-OOV queries fall back to the lowest ids.
std::vector<RetrievalResult> retrieve_queries(const Pipeline& p, std::size_t k, bool dedup) {
  const std::vector<Embedding> queries = p.encoder->encode_examples(p.test.examples());
  std::vector<RetrievalResult> results(p.test.size());
  parallel_for(p.test.size(), [&](std::size_t i) {
    const ReviewExample& ex = p.test[i];
    const std::optional<std::string_view> code = dedup ? std::optional<std::string_view>(ex.code) : std::nullopt;
    try {
      results[i] = retrieve(*p.db, queries[i], k, {}, code);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroQuery) throw;
      results[i] = lowest_id_fallback(*p.db, k, {}, code);
    }
    results[i].query_id = ex.id;
  });
  return results;
}

std::vector<GenerationOutput> run_generator(const ExperimentConfig& cfg, const std::vector<Prompt>& prompts,
                                            const std::vector<ResolvedRetrieval>& resolved) {
  switch (cfg.generator.kind) {
    case GeneratorSpec::Kind::ir: return ir_passthrough(resolved);
    case GeneratorSpec::Kind::mock:
      return mock_generate({prompts, cfg.max_new_tokens, cfg.decode_hint}, cfg.generator.mock_mode);
    case GeneratorSpec::Kind::remote: {
      RemoteGeneratorOptions options;
      options.batch_size = cfg.batch_size;
      return remote_generate(cfg.generator.url, {prompts, cfg.max_new_tokens, cfg.decode_hint}, options);
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown generator");
}

std::size_t retrieval_depth(const ExperimentConfig& cfg, std::size_t k) {
  // The IR baseline always needs a rank-1 neighbor, even for k = 0 prompts.
  return cfg.generator.kind == GeneratorSpec::Kind::ir ? std::max<std::size_t>(k, 1) : k;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  write_json(dir / "manifest.json", manifest.to_json());
}

/// Prompts, generation and evaluation for one (k, strategy) setting over
/// precomputed retrievals.
RunResult run_setting(const ExperimentConfig& cfg, const Pipeline& p, const std::vector<RetrievalResult>& retrievals,
                      const FrequencyTable& train_comments) {
  const std::filesystem::path& out = cfg.output_dir;
  std::filesystem::create_directories(out);
  write_json(out / "config.json", to_json(cfg));

  RunResult result;
  RunManifest& manifest = result.manifest;
  manifest.config_hash = config_hash(cfg);
  manifest.encoder_fingerprint = p.encoder->descriptor().fingerprint;
  manifest.started_at = now_utc();
  manifest.status = "failed";
  manifest.artifacts = {{"config", "config.json"}, {"index", "index"}};

  std::vector<ResolvedRetrieval> resolved(p.test.size());
  std::vector<Prompt> prompts(p.test.size());
  parallel_for(p.test.size(), [&](std::size_t i) {
    const ReviewExample& ex = p.test[i];
    resolved[i] = {ex.id, resolve(*p.db, retrievals[i])};
    const std::size_t take = std::min(cfg.k, resolved[i].exemplars.size());
    prompts[i] = build_prompt(ex.code, std::span(resolved[i].exemplars).first(take), cfg.strategy, cfg.budget, ex.id);
  });
  write_prompts_jsonl(prompts, out / "prompts.jsonl");
  manifest.artifacts.emplace_back("prompts", "prompts.jsonl");

  std::vector<GenerationOutput> outputs;
  try {
    outputs = run_generator(cfg, prompts, resolved);
  } catch (const Error& e) {
    manifest.error = e.what();
    manifest.finished_at = now_utc();
    write_manifest(out, manifest);
    throw;
  }
  write_outputs_jsonl(outputs, out / "outputs.jsonl");
  manifest.artifacts.emplace_back("outputs", "outputs.jsonl");

  std::vector<LengthInstance> instances;
  instances.reserve(p.test.size());
  for (std::size_t i = 0; i < p.test.size(); ++i) {
    instances.push_back({p.test[i].code, outputs[i].text, p.test[i].comment});
  }
  result.report = evaluate(instances, train_comments, cfg.eval);

  json zero_query = json::array();
  for (const RetrievalResult& r : retrievals) {
    if (r.zero_query) zero_query.push_back(*r.query_id);
  }
  result.report_json = {
      {"schema_version", kReportSchemaVersion},
      {"metadata",
       {{"config_hash", manifest.config_hash},
        {"encoder", p.encoder->descriptor().name},
        {"encoder_fingerprint", manifest.encoder_fingerprint},
        {"strategy", to_string(cfg.strategy)},
        {"k", cfg.k},
        {"budget", cfg.budget},
        {"backend", outputs.empty() ? cfg.generator.to_string() : outputs.front().backend},
        {"max_new_tokens", cfg.max_new_tokens},
        {"dedup_inference", cfg.dedup_inference}}},
      {"report", to_json(result.report)},
      {"zero_query_ids", zero_query},
  };
  write_json(out / "report.json", result.report_json);
  manifest.artifacts.emplace_back("report", "report.json");
  manifest.status = "ok";
  manifest.finished_at = now_utc();
  write_manifest(out, manifest);
  return result;
}

}  // namespace

json RunManifest::to_json() const {
  json artifact_map = json::object();
  for (const auto& [name, path] : artifacts) artifact_map[name] = path.generic_string();
  json doc = {{"config_hash", config_hash},
              {"encoder_fingerprint", encoder_fingerprint},
              {"started_at", started_at},
              {"finished_at", finished_at},
              {"status", status},
              {"artifacts", artifact_map}};
  if (!error.empty()) doc["error"] = error;
  return doc;
}

RunManifest cmd_index(const ExperimentConfig& cfg) {
  RunManifest manifest;
  manifest.started_at = now_utc();
  manifest.config_hash = config_hash(cfg);
  const Corpus train = load_role(cfg.train);
  const std::unique_ptr<Encoder> encoder = make_encoder(cfg, train);
  const RetrievalDatabase db = build_index(train, *encoder);
  save_index(db, cfg.output_dir / "index", encoder->descriptor().name, {{"corpus_digest", corpus_digest(train)}});
  manifest.encoder_fingerprint = db.fingerprint();
  manifest.artifacts = {{"index", "index"}};
  manifest.status = "ok";
  manifest.finished_at = now_utc();
  write_manifest(cfg.output_dir, manifest);
  return manifest;
}

RunResult cmd_run(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.normalize();
  const Pipeline p = prepare(cfg, true);
  const std::vector<RetrievalResult> retrievals =
      retrieve_queries(p, std::max<std::size_t>(1, retrieval_depth(cfg, cfg.k)), cfg.dedup_inference);
  const FrequencyTable train_comments = build_frequency_table(p.train, Field::comment);
  return run_setting(cfg, p, retrievals, train_comments);
}

SweepResult cmd_sweep(const ExperimentConfig& config, const std::vector<std::size_t>& k_values) {
  if (k_values.empty()) throw Error(ErrorCode::ConfigError, "sweep needs at least one k");
  const Pipeline p = prepare(config, true);
  const std::size_t depth = std::max<std::size_t>(
      1, retrieval_depth(config, *std::max_element(k_values.begin(), k_values.end())));
  const std::vector<RetrievalResult> retrievals = retrieve_queries(p, depth, config.dedup_inference);
  const FrequencyTable train_comments = build_frequency_table(p.train, Field::comment);

  SweepResult sweep;
  sweep.k_values = k_values;
  json rows = json::array();
  std::string tsv = "k\tstrategy\tem_pct\tbleu\tcorpus_bleu\n";
  for (std::size_t k : k_values) {
    ExperimentConfig cfg = config;
    cfg.k = k;
    cfg.normalize();
    cfg.output_dir = config.output_dir / ("k" + std::to_string(k));
    RunResult run = run_setting(cfg, p, retrievals, train_comments);
    // the shared index lives one level up
    run.manifest.artifacts[1].second = std::filesystem::path("..") / "index";
    write_manifest(cfg.output_dir, run.manifest);

    rows.push_back({{"k", k},
                    {"strategy", to_string(cfg.strategy)},
                    {"em_pct", run.report.em_pct},
                    {"bleu", run.report.bleu.score},
                    {"corpus_bleu", run.report.corpus_bleu.score},
                    {"report", ("k" + std::to_string(k)) + "/report.json"}});
    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << k << '\t' << to_string(cfg.strategy) << '\t' << run.report.em_pct
         << '\t' << run.report.bleu.score << '\t' << run.report.corpus_bleu.score << '\n';
    tsv += line.str();
    sweep.runs.push_back(std::move(run));
  }
  sweep.table = {{"schema_version", kReportSchemaVersion}, {"rows", rows}};
  write_json(config.output_dir / "sweep.json", sweep.table);
  write_text(config.output_dir / "sweep.tsv", tsv);
  return sweep;
}

StatsResult cmd_stats(const ExperimentConfig& cfg) {
  validate_thresholds(cfg.stats_thresholds);
  const Corpus train = load_role(cfg.train);
  const FrequencyTable table = build_frequency_table(train, Field::comment);

  StatsResult stats;
  stats.n_examples = train.size();
  stats.total_tokens = table.total_tokens();
  stats.unique_tokens = table.unique_tokens();
  stats.buckets = frequency_bucket_stats(table, train, cfg.stats_thresholds);

  json buckets = json::array();
  for (const BucketStat& b : stats.buckets) {
    buckets.push_back({{"threshold", b.threshold == kUnboundedThreshold ? json("inf") : json(b.threshold)},
                       {"unique_tokens", b.unique_tokens},
                       {"unique_tokens_pct", 100.0 * static_cast<double>(b.unique_tokens) /
                                                 static_cast<double>(std::max<std::size_t>(1, stats.unique_tokens))},
                       {"comments_containing", b.examples_containing},
                       {"comments_containing_pct", 100.0 * static_cast<double>(b.examples_containing) /
                                                       static_cast<double>(stats.n_examples)}});
  }
  stats.json = {{"schema_version", kReportSchemaVersion},
                {"n_comments", stats.n_examples},
                {"total_tokens", stats.total_tokens},
                {"unique_tokens", stats.unique_tokens},
                {"buckets", buckets}};
  write_json(cfg.output_dir / "stats.json", stats.json);

  std::string tsv;
  for (const auto& [token, count] : table.sorted()) tsv += token + "\t" + std::to_string(count) + "\n";
  write_text(cfg.output_dir / "frequencies.tsv", tsv);
  return stats;
}

RunManifest cmd_retrieve(const ExperimentConfig& cfg) {
  RunManifest manifest;
  manifest.started_at = now_utc();
  manifest.config_hash = config_hash(cfg);
  const Pipeline p = prepare(cfg, true);
  const std::vector<RetrievalResult> results = retrieve_queries(p, std::max<std::size_t>(cfg.k, 1), cfg.dedup_inference);
  std::string lines;
  for (const RetrievalResult& r : results) {
    json neighbors = json::array();
    for (const Neighbor& n : r.neighbors) neighbors.push_back({{"id", n.id}, {"score", n.score}});
    lines += json{{"query_id", *r.query_id}, {"neighbors", neighbors}, {"zero_query", r.zero_query}}.dump() + "\n";
  }
  write_text(cfg.output_dir / "retrieval.jsonl", lines);
  manifest.encoder_fingerprint = p.db->fingerprint();
  manifest.artifacts = {{"index", "index"}, {"retrieval", "retrieval.jsonl"}};
  manifest.status = "ok";
  manifest.finished_at = now_utc();
  write_manifest(cfg.output_dir, manifest);
  return manifest;
}

RunManifest cmd_prompt(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.normalize();
  RunManifest manifest;
  manifest.started_at = now_utc();
  manifest.config_hash = config_hash(cfg);
  const Pipeline p = prepare(cfg, true);
  const std::vector<RetrievalResult> results = retrieve_queries(p, std::max<std::size_t>(cfg.k, 1), cfg.dedup_inference);
  std::vector<Prompt> prompts(p.test.size());
  parallel_for(p.test.size(), [&](std::size_t i) {
    const std::vector<Exemplar> exemplars = resolve(*p.db, results[i]);
    const std::size_t take = std::min(cfg.k, exemplars.size());
    prompts[i] = build_prompt(p.test[i].code, std::span(exemplars).first(take), cfg.strategy, cfg.budget, p.test[i].id);
  });
  std::filesystem::create_directories(cfg.output_dir);
  write_prompts_jsonl(prompts, cfg.output_dir / "prompts.jsonl");
  manifest.encoder_fingerprint = p.db->fingerprint();
  manifest.artifacts = {{"index", "index"}, {"prompts", "prompts.jsonl"}};
  manifest.status = "ok";
  manifest.finished_at = now_utc();
  write_manifest(cfg.output_dir, manifest);
  return manifest;
}

}  // namespace rcg
