// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "lp/error.hpp"
#include "lp/log.hpp"

namespace lp {

HttpBackendConfig HttpBackendConfig::from_env(std::string model) {
  HttpBackendConfig c;
  c.model = std::move(model);
  if (const char* key = std::getenv("LP_API_KEY")) c.api_key = key;
  if (const char* url = std::getenv("LP_BASE_URL"); url && *url) c.base_url = url;
  return c;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base URL must include a scheme: " + config_.base_url);
  }
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  host_ = config_.base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

nlohmann::json chat_request_body(const CompletionRequest& request, const std::string& model) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user}});
  nlohmann::json body{
      {"model", model},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed_hint) body["seed"] = *request.seed_hint;
  return body;
}

CompletionResponse parse_chat_response(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& choice = j.at("choices").at(0);
    CompletionResponse r;
    const auto& content = choice.at("message").at("content");
    r.text = content.is_null() ? std::string{} : content.get<std::string>();
    const auto finish = choice.value("finish_reason", std::string{"stop"});
    r.finish_reason = finish == "length" ? FinishReason::length : FinishReason::stop;
    if (j.contains("usage") && j.at("usage").is_object()) {
      r.usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0LL);
      r.usage.completion_tokens = j.at("usage").value("completion_tokens", 0LL);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion response: ") + e.what());
  }
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
  request.validate();
  if (config_.api_key.empty()) throw CredentialError("LP_API_KEY is not set");

  const auto model = request.model.empty() ? config_.model : request.model;
  const auto body = chat_request_body(request, model).dump();
  const httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  const auto path = path_prefix_ + "/chat/completions";

  auto backoff = config_.initial_backoff;
  std::string last_failure;
  bool throttled = false;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      log::warn("retrying chat completion (attempt " + std::to_string(attempt + 1) + "): " +
                last_failure);
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.max_backoff);
    }

    httplib::Client client(host_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    ++requests_sent_;
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      throttled = false;
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 200) {
      auto response = parse_chat_response(res->body);
      if (response.truncated()) log::warn("completion truncated at max_tokens");
      return response;
    }
    if (status == 401 || status == 403) {
      throw CredentialError("chat backend rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429) {
      throttled = true;
      last_failure = "rate limited (HTTP 429)";
      continue;
    }
    if (status >= 500) {
      throttled = false;
      last_failure = "server error (HTTP " + std::to_string(status) + ")";
      continue;
    }
    throw BackendError("chat backend returned HTTP " + std::to_string(status) + ": " + res->body);
  }
  if (throttled) throw ThrottleError("rate limit persisted after retries: " + last_failure);
  throw TransportError("chat completion failed after retries: " + last_failure);
}

}  // namespace lp
