#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcg/index.hpp"

namespace rcg {

enum class AugmentationStrategy { none, singleton, pair };

std::string_view to_string(AugmentationStrategy strategy) noexcept;
std::optional<AugmentationStrategy> parse_strategy(std::string_view name) noexcept;

inline constexpr std::string_view kCommentSeparator = "[nsep]";
inline constexpr std::string_view kCodeSeparator = "[csep]";
inline constexpr std::size_t kDefaultInputBudget = 512;

/// A retrieved neighbor with its database row resolved.
struct Exemplar {
  std::string id;
  float score = 0.0f;
  std::string code;
  std::string comment;
};

std::vector<Exemplar> resolve(const RetrievalDatabase& db, const RetrievalResult& result);

struct Prompt {
  std::string query_id;
  std::string text;
  std::vector<std::string> included_exemplar_ids;
  AugmentationStrategy strategy = AugmentationStrategy::none;
  std::size_t token_count = 0;
  std::size_t budget = kDefaultInputBudget;
};

/// Query first, then each exemplar in rank order as
/// " [nsep] comment [csep] code" (pair) or " [nsep] comment" (singleton).
/// An exemplar goes in only if the whole addition fits the budget; packing
/// stops at the first one that does not. A query longer than the budget is
/// cut to its first `budget` tokens (joined by single spaces) and gets no
/// exemplars.
Prompt build_prompt(std::string_view query_code, std::span<const Exemplar> exemplars,
                    AugmentationStrategy strategy, std::size_t budget, std::string query_id = {});

/// One prompt per k, each built from the top-k exemplar prefix; k = 0 is the
/// bare query.
std::vector<Prompt> sweep_prompts(std::string_view query_code, std::span<const Exemplar> exemplars,
                                  AugmentationStrategy strategy, std::size_t budget,
                                  std::span<const std::size_t> k_values, std::string query_id = {});

/// Text before the first " [nsep] " delimiter.
std::string_view query_segment(std::string_view prompt_text);

void write_prompts_jsonl(std::span<const Prompt> prompts, const std::filesystem::path& path);

}  // namespace rcg
