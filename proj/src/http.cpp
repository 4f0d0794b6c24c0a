#include "rcg/http.hpp"

#include <httplib.h>

#include <optional>
#include <thread>

namespace rcg {

Endpoint Endpoint::parse(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::ConfigError, "endpoint must be an http:// URL: " + std::string(url));
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = std::string(url.substr(0, path_begin));
  if (e.origin.size() <= scheme_end + 3) throw Error(ErrorCode::ConfigError, "endpoint has no host: " + std::string(url));
  if (path_begin != std::string_view::npos) {
    e.prefix = std::string(url.substr(path_begin));
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  return e;
}

namespace {

using nlohmann::json;

bool retryable(int status) { return status == 429 || status >= 500; }

template <typename Send>
json request_json(const Endpoint& endpoint, std::string_view route, const RetryPolicy& policy,
                  ErrorCode failure, Send&& send) {
  const std::string path = endpoint.prefix + std::string(route);
  std::string last_error;
  auto backoff = policy.initial_backoff;
  for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
    httplib::Client client(endpoint.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Result result = send(client, path);
    if (!result) {
      last_error = endpoint.url() + std::string(route) + ": " + httplib::to_string(result.error());
    } else if (result->status >= 200 && result->status < 300) {
      json reply = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
      if (reply.is_discarded()) {
        throw Error(ErrorCode::ProtocolViolation, "non-JSON reply from " + endpoint.url() + std::string(route));
      }
      return reply;
    } else {
      last_error = endpoint.url() + std::string(route) + ": HTTP " + std::to_string(result->status) + ": " +
                   result->body;
      if (!retryable(result->status)) break;
    }
    if (attempt < policy.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(failure, last_error);
}

}  // namespace

json post_json(const Endpoint& endpoint, std::string_view route, const json& body, const RetryPolicy& policy,
               ErrorCode failure) {
  const std::string payload = body.dump();
  return request_json(endpoint, route, policy, failure, [&](httplib::Client& client, const std::string& path) {
    return client.Post(path, payload, "application/json");
  });
}

json get_json(const Endpoint& endpoint, std::string_view route, const RetryPolicy& policy, ErrorCode failure) {
  return request_json(endpoint, route, policy, failure,
                      [&](httplib::Client& client, const std::string& path) { return client.Get(path); });
}

}  // namespace rcg
