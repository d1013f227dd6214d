// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/backend.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "lp/error.hpp"

namespace lp {

void CompletionRequest::validate() const {
  if (user.empty()) throw InvalidArgument("completion request has an empty user message");
  if (temperature < 0.0 || temperature > 2.0) {
    throw InvalidArgument("completion temperature must lie in [0, 2]");
  }
  if (max_tokens < 1) throw InvalidArgument("completion max_tokens must be >= 1");
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "error";
}

FinishReason parse_finish_reason(std::string_view text) {
  if (text == "stop") return FinishReason::stop;
  if (text == "length") return FinishReason::length;
  return FinishReason::error;
}

std::string cache_key_material(const CompletionRequest& request, std::string_view endpoint) {
  char temperature[32];
  std::snprintf(temperature, sizeof temperature, "%.4f", request.temperature);
  // nlohmann::json objects are key-sorted, so this is independent of the
  // order in which the request was built.
  const nlohmann::json j{
      {"endpoint", endpoint},
      {"model", request.model},
      {"system", request.system},
      {"user", request.user},
      {"temperature", temperature},
      {"max_tokens", request.max_tokens},
  };
  if (!request.seed_hint) return j.dump();
  // Repeated samples of one prompt (candidates, compression retries) only
  // stay distinct in the cache when the hint takes part in the key.
  auto with_seed = j;
  with_seed["seed_hint"] = *request.seed_hint;
  return with_seed.dump();
}

std::string cache_key(const CompletionRequest& request, std::string_view endpoint) {
  const auto material = cache_key_material(request, endpoint);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(material.data(), material.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

nlohmann::json to_json(const CompletionRequest& r) {
  nlohmann::json j{{"model", r.model},           {"system", r.system},
                   {"user", r.user},             {"temperature", r.temperature},
                   {"max_tokens", r.max_tokens}, {"seed_hint", nullptr}};
  if (r.seed_hint) j["seed_hint"] = *r.seed_hint;
  return j;
}

nlohmann::json to_json(const CompletionResponse& r) {
  return {{"text", r.text},
          {"finish_reason", to_string(r.finish_reason)},
          {"usage",
           {{"prompt_tokens", r.usage.prompt_tokens},
            {"completion_tokens", r.usage.completion_tokens}}}};
}

CompletionResponse completion_response_from_json(const nlohmann::json& j) {
  CompletionResponse r;
  r.text = j.at("text").get<std::string>();
  r.finish_reason = parse_finish_reason(j.at("finish_reason").get<std::string>());
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0LL);
    r.usage.completion_tokens = j.at("usage").value("completion_tokens", 0LL);
  }
  return r;
}

}  // namespace lp
