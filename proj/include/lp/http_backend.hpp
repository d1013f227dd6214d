// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <string>

#include "lp/backend.hpp"

namespace lp {

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{20000};
  std::chrono::seconds timeout{120};

  /// Reads LP_API_KEY and LP_BASE_URL. The key is only ever taken from the
  /// environment.
  static HttpBackendConfig from_env(std::string model);
};

/// OpenAI-compatible POST {base_url}/chat/completions client.
///
/// 429, 5xx and transport failures are retried with exponential backoff;
/// 401/403 fail immediately with CredentialError. Each call opens its own
/// connection, so concurrent callers do not share client state.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string model_name() const override { return config_.model; }
  std::string endpoint() const override { return config_.base_url; }

  /// Requests put on the wire by any HttpBackend in this process.
  static std::uint64_t requests_sent() { return requests_sent_.load(); }

 private:
  HttpBackendConfig config_;
  std::string host_;         // scheme://host[:port]
  std::string path_prefix_;  // e.g. /v1
  static inline std::atomic<std::uint64_t> requests_sent_{0};
};

/// Request body for one chat completion.
nlohmann::json chat_request_body(const CompletionRequest& request, const std::string& model);

/// Parses a chat-completions response body. Throws BackendError.
CompletionResponse parse_chat_response(const std::string& body);

}  // namespace lp
