#include "rcg/generate.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "rcg/error.hpp"
#include "rcg/tokenizer.hpp"

namespace rcg {

using nlohmann::json;

std::vector<GenerationOutput> ir_passthrough(std::span<const ResolvedRetrieval> results) {
  std::vector<GenerationOutput> out;
  out.reserve(results.size());
  for (const ResolvedRetrieval& r : results) {
    if (r.exemplars.empty()) throw Error(ErrorCode::NoExemplar, "no retrieved exemplar for '" + r.query_id + "'");
    out.push_back({r.query_id, r.exemplars.front().comment, "ir"});
  }
  return out;
}

std::optional<MockMode> parse_mock_mode(std::string_view name) noexcept {
  if (name == "echo_query") return MockMode::echo_query;
  if (name == "fixed") return MockMode::fixed;
  if (name == "copy_first_exemplar") return MockMode::copy_first_exemplar;
  return std::nullopt;
}

std::string_view to_string(MockMode mode) noexcept {
  switch (mode) {
    case MockMode::echo_query: return "echo_query";
    case MockMode::fixed: return "fixed";
    case MockMode::copy_first_exemplar: return "copy_first_exemplar";
  }
  return "fixed";
}

void validate(const GenerationRequest& request) {
  if (request.max_new_tokens == 0) throw Error(ErrorCode::InvalidArgument, "max_new_tokens must be at least 1");
}

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string first_exemplar_comment(const Prompt& prompt) {
  const std::string_view text = prompt.text;
  const auto open = text.find(kCommentSeparator);
  if (open == std::string_view::npos) {
    throw Error(ErrorCode::NoExemplar, "prompt for '" + prompt.query_id + "' has no exemplar");
  }
  const std::string_view rest = text.substr(open + kCommentSeparator.size());
  const auto close = std::min(rest.find(kCodeSeparator), rest.find(kCommentSeparator));
  return trim(rest.substr(0, close));
}

}  // namespace

std::vector<GenerationOutput> mock_generate(const GenerationRequest& request, MockMode mode) {
  validate(request);
  const std::string backend = "mock:" + std::string(to_string(mode));
  std::vector<GenerationOutput> out;
  out.reserve(request.prompts.size());
  for (const Prompt& p : request.prompts) {
    std::string text;
    switch (mode) {
      case MockMode::fixed: text = std::string(kMockFixedText); break;
      case MockMode::copy_first_exemplar: text = first_exemplar_comment(p); break;
      case MockMode::echo_query: {
        TokenSequence tokens = tokenize(query_segment(p.text));
        if (tokens.size() > request.max_new_tokens) tokens.resize(request.max_new_tokens);
        text = join(tokens);
        break;
      }
    }
    out.push_back({p.query_id, std::move(text), backend});
  }
  return out;
}

std::vector<GenerationOutput> remote_generate(const std::string& endpoint, const GenerationRequest& request,
                                              const RemoteGeneratorOptions& options) {
  validate(request);
  if (options.batch_size == 0) throw Error(ErrorCode::ConfigError, "generator batch size must be positive");
  const Endpoint target = Endpoint::parse(endpoint);
  std::vector<GenerationOutput> out;
  out.reserve(request.prompts.size());
  for (std::size_t begin = 0; begin < request.prompts.size(); begin += options.batch_size) {
    const std::size_t end = std::min(request.prompts.size(), begin + options.batch_size);
    json body = {{"prompts", json::array()},
                 {"max_new_tokens", request.max_new_tokens},
                 {"decode_hint", request.decode_hint}};
    for (std::size_t i = begin; i < end; ++i) body["prompts"].push_back(request.prompts[i].text);

    const json reply = post_json(target, "/generate", body, options.retry, ErrorCode::GeneratorUnavailable);
    if (!reply.contains("outputs") || !reply["outputs"].is_array() || reply["outputs"].size() != end - begin) {
      throw Error(ErrorCode::ProtocolViolation, "/generate returned " +
                                                    std::to_string(reply.contains("outputs") ? reply["outputs"].size() : 0) +
                                                    " outputs for " + std::to_string(end - begin) + " prompts");
    }
    const std::string model = reply.value("model", json()).is_string() ? reply["model"].get<std::string>() : "";
    for (std::size_t i = begin; i < end; ++i) {
      const json& text = reply["outputs"][i - begin];
      if (!text.is_string()) throw Error(ErrorCode::ProtocolViolation, "/generate returned a non-string output");
      out.push_back({request.prompts[i].query_id, trim(text.get<std::string>()), "remote:" + model});
    }
  }
  return out;
}

void write_outputs_jsonl(std::span<const GenerationOutput> outputs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const GenerationOutput& o : outputs) {
    out << json{{"query_id", o.query_id}, {"text", o.text}, {"backend", o.backend}}.dump() << '\n';
  }
}

}  // namespace rcg
