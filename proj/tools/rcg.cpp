// rcg: retrieval-augmented review comment generation toolkit.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rcg/runner.hpp"
#include "rcg/simd/dot.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::size_t> k;
  std::string out;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config, "Experiment config (JSON)")->required();
  sub->add_option("--k", opts.k, "Number of retrieved exemplars (overrides config)");
  sub->add_option("--out", opts.out, "Output directory (overrides config)");
}

rcg::ExperimentConfig resolve_config(const CommonOptions& opts) {
  rcg::ExperimentConfig cfg = rcg::load_config(opts.config);
  if (opts.k) cfg.k = *opts.k;
  if (!opts.out.empty()) cfg.output_dir = std::filesystem::absolute(opts.out);
  cfg.normalize();
  return cfg;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find("..");
    try {
      if (dash != std::string::npos) {
        const std::size_t lo = std::stoul(item.substr(0, dash));
        const std::size_t hi = std::stoul(item.substr(dash + 2));
        for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
      } else if (!item.empty()) {
        out.push_back(std::stoul(item));
      }
    } catch (const std::exception&) {
      throw rcg::Error(rcg::ErrorCode::ConfigError, "bad --k-values entry '" + item + "'");
    }
  }
  return out;
}

void print_report_summary(const rcg::RunResult& run, const std::filesystem::path& out) {
  std::printf("instances=%zu em=%.4f em_strict=%.4f bleu=%.4f corpus_bleu=%.4f\n", run.report.n_instances,
              run.report.em_pct, run.report.em_strict_pct, run.report.bleu.score, run.report.corpus_bleu.score);
  std::printf("report: %s\n", (out / "report.json").string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rcg - retrieval-augmented review comment generation"};
  app.require_subcommand(1);

  CommonOptions index_opts, run_opts, sweep_opts, stats_opts, retrieve_opts, prompt_opts;
  std::string k_values;
  add_common(app.add_subcommand("index", "Build and save the retrieval database"), index_opts);
  add_common(app.add_subcommand("run", "Retrieve, prompt, generate and evaluate"), run_opts);
  auto* sweep = app.add_subcommand("sweep", "Run once per retrieval size");
  add_common(sweep, sweep_opts);
  sweep->add_option("--k-values", k_values, "Comma list or range, e.g. 0..8 (default: config k_values)");
  add_common(app.add_subcommand("stats", "Training comment token-frequency statistics"), stats_opts);
  add_common(app.add_subcommand("retrieve", "Write top-k neighbors for the test split"), retrieve_opts);
  add_common(app.add_subcommand("prompt", "Write augmented prompts for the test split"), prompt_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("index")) {
      const auto cfg = resolve_config(index_opts);
      const auto manifest = rcg::cmd_index(cfg);
      std::printf("index: %s (fingerprint %s, simd %s)\n", (cfg.output_dir / "index").string().c_str(),
                  manifest.encoder_fingerprint.c_str(), std::string(rcg::simd::to_string(rcg::simd::active_isa())).c_str());
    } else if (app.got_subcommand("run")) {
      const auto cfg = resolve_config(run_opts);
      print_report_summary(rcg::cmd_run(cfg), cfg.output_dir);
    } else if (app.got_subcommand("sweep")) {
      const auto cfg = resolve_config(sweep_opts);
      const auto ks = k_values.empty() ? cfg.k_values : parse_k_list(k_values);
      const auto result = rcg::cmd_sweep(cfg, ks);
      std::printf("k\tstrategy\tem_pct\tbleu\tcorpus_bleu\n");
      for (const auto& row : result.table["rows"]) {
        std::printf("%zu\t%s\t%.4f\t%.4f\t%.4f\n", row["k"].get<std::size_t>(),
                    row["strategy"].get<std::string>().c_str(), row["em_pct"].get<double>(),
                    row["bleu"].get<double>(), row["corpus_bleu"].get<double>());
      }
    } else if (app.got_subcommand("stats")) {
      const auto cfg = resolve_config(stats_opts);
      const auto stats = rcg::cmd_stats(cfg);
      std::printf("comments=%zu tokens=%llu unique=%zu\n", stats.n_examples,
                  static_cast<unsigned long long>(stats.total_tokens), stats.unique_tokens);
      std::printf("threshold\tunique_tokens\tcomments_containing\n");
      for (const auto& row : stats.json["buckets"]) {
        std::printf("<=%s\t%zu (%.2f%%)\t%zu (%.2f%%)\n", row["threshold"].dump().c_str(),
                    row["unique_tokens"].get<std::size_t>(), row["unique_tokens_pct"].get<double>(),
                    row["comments_containing"].get<std::size_t>(), row["comments_containing_pct"].get<double>());
      }
    } else if (app.got_subcommand("retrieve")) {
      const auto cfg = resolve_config(retrieve_opts);
      rcg::cmd_retrieve(cfg);
      std::printf("retrieval: %s\n", (cfg.output_dir / "retrieval.jsonl").string().c_str());
    } else if (app.got_subcommand("prompt")) {
      const auto cfg = resolve_config(prompt_opts);
      rcg::cmd_prompt(cfg);
      std::printf("prompts: %s\n", (cfg.output_dir / "prompts.jsonl").string().c_str());
    }
  } catch (const rcg::Error& e) {
    std::fprintf(stderr, "rcg: %s\n", e.what());
    return rcg::exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "rcg: malformed data: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "rcg: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rcg: %s\n", e.what());
    return 1;
  }
  return 0;
}
