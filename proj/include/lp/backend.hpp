// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Chat-completion interface. Every model call in the learning loop goes
// through Backend::complete.

#pragma once

#include <optional>
#include <string>

#include "json.hpp"

namespace lp {

struct CompletionRequest {
  std::string model;  // empty: the backend's configured model
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<int> seed_hint;

  /// Throws InvalidArgument on empty user text, temperature outside [0,2]
  /// or max_tokens < 1.
  void validate() const;
};

enum class FinishReason { stop, length, error };

std::string_view to_string(FinishReason reason);
FinishReason parse_finish_reason(std::string_view text);

struct Usage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct CompletionResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  Usage usage;
  bool cached = false;

  bool truncated() const { return finish_reason == FinishReason::length; }
};

class Backend {
 public:
  virtual ~Backend() = default;

  /// Implementations must tolerate concurrent calls.
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;

  /// Model used when a request leaves CompletionRequest::model empty.
  virtual std::string model_name() const = 0;

  /// Identifies where requests go; part of the cache key.
  virtual std::string endpoint() const = 0;
};

/// Canonical text hashed by cache_key: key-sorted compact JSON over
/// endpoint, max_tokens, model, system, temperature (fixed 4 decimals) and
/// user. seed_hint joins the key only when it is set.
std::string cache_key_material(const CompletionRequest& request, std::string_view endpoint);

/// Lowercase hex SHA-256 of cache_key_material.
std::string cache_key(const CompletionRequest& request, std::string_view endpoint);

nlohmann::json to_json(const CompletionRequest& request);
nlohmann::json to_json(const CompletionResponse& response);
CompletionResponse completion_response_from_json(const nlohmann::json& j);

}  // namespace lp
