#include "rcg/prompt.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "rcg/error.hpp"
#include "rcg/tokenizer.hpp"

namespace rcg {

std::string_view to_string(AugmentationStrategy strategy) noexcept {
  switch (strategy) {
    case AugmentationStrategy::none: return "none";
    case AugmentationStrategy::singleton: return "singleton";
    case AugmentationStrategy::pair: return "pair";
  }
  return "none";
}

std::optional<AugmentationStrategy> parse_strategy(std::string_view name) noexcept {
  if (name == "none") return AugmentationStrategy::none;
  if (name == "singleton") return AugmentationStrategy::singleton;
  if (name == "pair") return AugmentationStrategy::pair;
  return std::nullopt;
}

std::vector<Exemplar> resolve(const RetrievalDatabase& db, const RetrievalResult& result) {
  std::vector<Exemplar> out;
  out.reserve(result.neighbors.size());
  for (const Neighbor& n : result.neighbors) {
    const auto& entry = db.entry(n.position);
    out.push_back({n.id, n.score, entry.code, entry.comment});
  }
  return out;
}

namespace {

std::string exemplar_suffix(const Exemplar& ex, AugmentationStrategy strategy) {
  std::string out;
  out.reserve(ex.comment.size() + ex.code.size() + 16);
  out.append(" ").append(kCommentSeparator).append(" ").append(ex.comment);
  if (strategy == AugmentationStrategy::pair) {
    out.append(" ").append(kCodeSeparator).append(" ").append(ex.code);
  }
  return out;
}

}  // namespace

Prompt build_prompt(std::string_view query_code, std::span<const Exemplar> exemplars,
                    AugmentationStrategy strategy, std::size_t budget, std::string query_id) {
  if (budget == 0) throw Error(ErrorCode::InvalidBudget, "prompt budget must be at least 1 token");

  Prompt prompt;
  prompt.query_id = std::move(query_id);
  prompt.strategy = strategy;
  prompt.budget = budget;

  const std::size_t query_tokens = count_tokens(query_code);
  if (query_tokens > budget) {
    TokenSequence tokens = tokenize(query_code);
    tokens.resize(budget);
    prompt.text = join(tokens);
    prompt.token_count = count_tokens(prompt.text);
    return prompt;
  }

  prompt.text = std::string(query_code);
  prompt.token_count = query_tokens;
  if (strategy == AugmentationStrategy::none) return prompt;

  for (const Exemplar& ex : exemplars) {
    std::string candidate = prompt.text + exemplar_suffix(ex, strategy);
    const std::size_t tokens = count_tokens(candidate);
    if (tokens > budget) break;
    prompt.text = std::move(candidate);
    prompt.token_count = tokens;
    prompt.included_exemplar_ids.push_back(ex.id);
  }
  return prompt;
}

std::vector<Prompt> sweep_prompts(std::string_view query_code, std::span<const Exemplar> exemplars,
                                  AugmentationStrategy strategy, std::size_t budget,
                                  std::span<const std::size_t> k_values, std::string query_id) {
  std::vector<Prompt> prompts;
  prompts.reserve(k_values.size());
  for (std::size_t k : k_values) {
    if (k > exemplars.size()) {
      throw Error(ErrorCode::InvalidArgument, "k = " + std::to_string(k) + " exceeds the " +
                                                  std::to_string(exemplars.size()) + " retrieved exemplars");
    }
    const AugmentationStrategy effective = k == 0 ? AugmentationStrategy::none : strategy;
    prompts.push_back(build_prompt(query_code, exemplars.first(k), effective, budget, query_id));
  }
  return prompts;
}

std::string_view query_segment(std::string_view prompt_text) {
  const std::string delimiter = " " + std::string(kCommentSeparator) + " ";
  const auto pos = prompt_text.find(delimiter);
  return pos == std::string_view::npos ? prompt_text : prompt_text.substr(0, pos);
}

void write_prompts_jsonl(std::span<const Prompt> prompts, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const Prompt& p : prompts) {
    nlohmann::json line = {{"query_id", p.query_id},
                           {"text", p.text},
                           {"exemplars", p.included_exemplar_ids},
                           {"strategy", to_string(p.strategy)},
                           {"token_count", p.token_count}};
    out << line.dump() << '\n';
  }
}

}  // namespace rcg
