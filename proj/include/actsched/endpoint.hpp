#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "actsched/prompts.hpp"

namespace actsched {

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 200;
  double backoff_multiplier = 2.0;
};

/// Where and how to talk to a chat-completion endpoint. The key is the
/// resolved secret (configuration decides where it comes from).
struct ChatEndpoint {
  std::string base_url = "http://localhost:8000/v1";
  std::string model_name = "editor";
  std::string api_key;
  double temperature = 0.7;
  int max_rounds = 3;  // editor-loop default carried alongside the endpoint
  int timeout_seconds = 60;
  RetryPolicy retry;

  std::string identity() const { return base_url + " (" + model_name + ")"; }
};

struct EndpointError : std::runtime_error {
  std::string endpoint;
  int attempts;
  EndpointError(std::string endpoint_id, int attempt_count, const std::string& what)
      : std::runtime_error("endpoint " + endpoint_id + " failed after " +
                           std::to_string(attempt_count) +
                           (attempt_count == 1 ? " attempt: " : " attempts: ") + what),
        endpoint(std::move(endpoint_id)),
        attempts(attempt_count) {}
};

/// Anything that can answer a two-message chat. The HTTP client below is the
/// production implementation; tests use scripted or synthetic stand-ins.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::string& system_text, const std::string& user_text) = 0;
};

namespace detail {

/// Splits "scheme://host:port/some/path" into the origin httplib wants and
/// the path prefix every request must carry.
inline std::pair<std::string, std::string> split_origin(const std::string& base_url) {
  const std::size_t scheme = base_url.find("://");
  const std::size_t path_at =
      base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  std::string origin = path_at == std::string::npos ? base_url : base_url.substr(0, path_at);
  std::string path = path_at == std::string::npos ? "" : base_url.substr(path_at);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {std::move(origin), std::move(path)};
}

}  // namespace detail

/// Talks the de-facto open chat-completion wire shape:
/// POST {base}/chat/completions, answer read from choices[0].message.content.
/// Transient failures (connect errors, 429, 5xx) are retried with exponential
/// backoff; anything else fails immediately with a typed error.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string complete(const std::string& system_text, const std::string& user_text) override {
    nlohmann::json payload{
        {"model", endpoint_.model_name},
        {"messages",
         {{{"role", "system"}, {"content", system_text}},
          {{"role", "user"}, {"content", user_text}}}},
        {"temperature", endpoint_.temperature},
    };
    const std::string body = payload.dump();
    const auto [origin, prefix] = detail::split_origin(endpoint_.base_url);
    const std::string path = prefix + "/chat/completions";

    int backoff_ms = endpoint_.retry.initial_backoff_ms;
    std::string last_failure = "no attempt made";
    const int max_attempts = std::max(1, endpoint_.retry.max_attempts);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      httplib::Client client(origin);
      client.set_connection_timeout(endpoint_.timeout_seconds, 0);
      client.set_read_timeout(endpoint_.timeout_seconds, 0);
      httplib::Headers headers;
      if (!endpoint_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
      }
      auto res = client.Post(path, headers, body, "application/json");
      if (!res) {
        last_failure = "transport error: " + httplib::to_string(res.error());
      } else if (res->status == 429 || res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
      } else if (res->status < 200 || res->status >= 300) {
        throw EndpointError(endpoint_.identity(), attempt,
                            "HTTP " + std::to_string(res->status) + ": " + res->body);
      } else {
        try {
          const auto doc = nlohmann::json::parse(res->body);
          return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
          throw EndpointError(endpoint_.identity(), attempt,
                              std::string("malformed completion response: ") + e.what());
        }
      }
      if (attempt < max_attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms = static_cast<int>(backoff_ms * endpoint_.retry.backoff_multiplier);
      }
    }
    throw EndpointError(endpoint_.identity(), max_attempts, last_failure);
  }

 private:
  ChatEndpoint endpoint_;
};

inline std::string chat_complete(const ChatEndpoint& endpoint, const std::string& system_text,
                                 const std::string& user_text) {
  HttpChatClient client(endpoint);
  return client.complete(system_text, user_text);
}

/// Replays a fixed list of responses (repeating the last one once exhausted,
/// unless told otherwise) and records every prompt it saw.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::vector<std::string> responses, bool repeat_last = true)
      : responses_(std::move(responses)), repeat_last_(repeat_last) {}

  std::string complete(const std::string& system_text, const std::string& user_text) override {
    std::lock_guard<std::mutex> lock(mutex_);
    calls_.push_back({system_text, user_text});
    if (next_ < responses_.size()) return responses_[next_++];
    if (repeat_last_ && !responses_.empty()) return responses_.back();
    throw EndpointError("scripted", static_cast<int>(calls_.size()), "script exhausted");
  }

  const std::vector<PromptPair>& calls() const { return calls_; }
  std::size_t call_count() const { return calls_.size(); }

 private:
  std::mutex mutex_;
  std::vector<std::string> responses_;
  std::vector<PromptPair> calls_;
  std::size_t next_ = 0;
  bool repeat_last_;
};

}  // namespace actsched
