#pragma once

#include <chrono>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "rcg/error.hpp"

namespace rcg {

/// "http://host:port/prefix" split into the part httplib connects to and a
/// path prefix prepended to every route.
struct Endpoint {
  std::string origin;
  std::string prefix;

  std::string url() const { return origin + prefix; }
  static Endpoint parse(std::string_view url);
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::milliseconds timeout{120000};
};

/// POSTs JSON and parses a JSON reply. Transport failures, 5xx and 429 are
/// retried with doubling backoff; the final failure (or any other non-2xx)
/// raises `failure` carrying the status and body. Unparseable replies raise
/// ProtocolViolation.
nlohmann::json post_json(const Endpoint& endpoint, std::string_view route, const nlohmann::json& body,
                         const RetryPolicy& policy, ErrorCode failure);

nlohmann::json get_json(const Endpoint& endpoint, std::string_view route, const RetryPolicy& policy,
                        ErrorCode failure);

}  // namespace rcg
