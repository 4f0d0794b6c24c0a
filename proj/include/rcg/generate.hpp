#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcg/http.hpp"
#include "rcg/prompt.hpp"

namespace rcg {

inline constexpr std::size_t kDefaultMaxNewTokens = 128;

struct GenerationRequest {
  std::vector<Prompt> prompts;
  std::size_t max_new_tokens = kDefaultMaxNewTokens;
  /// Passed through untouched to remote backends (e.g. "beam=10").
  std::string decode_hint;
};

struct GenerationOutput {
  std::string query_id;
  std::string text;
  std::string backend;

  bool operator==(const GenerationOutput&) const = default;
};

/// Retrieval results with their neighbors resolved to database rows.
struct ResolvedRetrieval {
  std::string query_id;
  std::vector<Exemplar> exemplars;
};

/// The IR baseline: reuse the rank-1 neighbor's comment verbatim.
std::vector<GenerationOutput> ir_passthrough(std::span<const ResolvedRetrieval> results);

enum class MockMode { echo_query, fixed, copy_first_exemplar };

std::optional<MockMode> parse_mock_mode(std::string_view name) noexcept;
std::string_view to_string(MockMode mode) noexcept;

inline constexpr std::string_view kMockFixedText = "MOCK";

/// Deterministic test double. echo_query returns the first max_new_tokens
/// tokens of the query segment; fixed returns "MOCK"; copy_first_exemplar
/// returns the first exemplar's comment.
std::vector<GenerationOutput> mock_generate(const GenerationRequest& request, MockMode mode);

struct RemoteGeneratorOptions {
  std::size_t batch_size = 16;
  RetryPolicy retry;
};

/// Posts prompts in batches to `<endpoint>/generate`; outputs keep request
/// order and are whitespace-trimmed.
std::vector<GenerationOutput> remote_generate(const std::string& endpoint, const GenerationRequest& request,
                                              const RemoteGeneratorOptions& options = {});

void validate(const GenerationRequest& request);

void write_outputs_jsonl(std::span<const GenerationOutput> outputs, const std::filesystem::path& path);

}  // namespace rcg
