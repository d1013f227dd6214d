// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/mock_backend.hpp"

#include <algorithm>

#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/text.hpp"

namespace lp {

MockScript::MockScript(std::vector<MockRule> rules) : rules_(std::move(rules)) {
  for (const auto& rule : rules_) {
    if (rule.max_uses && *rule.max_uses < 0) throw ConfigError("mock rule max_uses must be >= 0");
    if (rule.kind == MatchKind::regex) {
      try {
        compiled_.emplace_back(std::regex(rule.match, std::regex::ECMAScript));
      } catch (const std::regex_error& e) {
        throw ConfigError("bad mock regex '" + rule.match + "': " + e.what());
      }
    } else {
      compiled_.emplace_back(std::nullopt);
    }
    remaining_.push_back(rule.max_uses);
  }
}

MockScript MockScript::from_json(const nlohmann::json& records) {
  if (!records.is_array()) throw ConfigError("mock script must be a list of rules");
  std::vector<MockRule> rules;
  for (const auto& r : records) {
    MockRule rule;
    const auto kind = r.value("match_kind", std::string{"substring"});
    if (kind == "substring") {
      rule.kind = MatchKind::substring;
    } else if (kind == "regex" || kind == "pattern") {
      rule.kind = MatchKind::regex;
    } else if (kind == "all_of") {
      rule.kind = MatchKind::all_of;
    } else {
      throw ConfigError("unknown mock match_kind '" + kind + "'");
    }
    if (!r.contains("match") || !r.contains("response")) {
      throw ConfigError("mock rule needs 'match' and 'response'");
    }
    if (rule.kind == MatchKind::all_of) {
      rule.all = r.at("match").get<std::vector<std::string>>();
    } else {
      rule.match = r.at("match").get<std::string>();
    }
    rule.response = r.at("response").get<std::string>();
    if (r.contains("max_uses") && !r.at("max_uses").is_null()) {
      rule.max_uses = r.at("max_uses").get<int>();
    }
    rules.push_back(std::move(rule));
  }
  return MockScript(std::move(rules));
}

MockScript MockScript::from_file(const std::filesystem::path& path) {
  const auto body = io::read_file(path);
  const auto trimmed = text::trim(body);
  try {
    if (!trimmed.empty() && trimmed.front() == '[') return from_json(nlohmann::json::parse(body));
    nlohmann::json records = nlohmann::json::array();
    for (const auto& line : text::split_lines(body)) {
      if (text::trim(line).empty()) continue;
      records.push_back(nlohmann::json::parse(line));
    }
    return from_json(records);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed mock script " + path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const MockRule& rule) {
  nlohmann::json j;
  switch (rule.kind) {
    case MatchKind::substring:
      j["match_kind"] = "substring";
      j["match"] = rule.match;
      break;
    case MatchKind::regex:
      j["match_kind"] = "regex";
      j["match"] = rule.match;
      break;
    case MatchKind::all_of:
      j["match_kind"] = "all_of";
      j["match"] = rule.all;
      break;
  }
  j["response"] = rule.response;
  j["max_uses"] = rule.max_uses ? nlohmann::json(*rule.max_uses) : nlohmann::json(nullptr);
  return j;
}

std::string mock_match(MockScript& script, std::string_view prompt) {
  for (std::size_t i = 0; i < script.rules_.size(); ++i) {
    auto& remaining = script.remaining_[i];
    if (remaining && *remaining == 0) continue;
    const auto& rule = script.rules_[i];
    bool hit = false;
    switch (rule.kind) {
      case MatchKind::substring:
        hit = text::contains(prompt, rule.match);
        break;
      case MatchKind::regex:
        hit = std::regex_search(prompt.begin(), prompt.end(), *script.compiled_[i]);
        break;
      case MatchKind::all_of:
        hit = std::all_of(rule.all.begin(), rule.all.end(),
                          [&](const std::string& s) { return text::contains(prompt, s); });
        break;
    }
    if (!hit) continue;
    if (remaining) --*remaining;
    return rule.response;
  }
  throw UnmatchedPromptError(std::string(prompt));
}

MockBackend::MockBackend(MockScript script, std::string model)
    : model_(std::move(model)), script_(std::move(script)) {}

CompletionResponse MockBackend::complete(const CompletionRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  calls_.push_back(request);
  CompletionResponse response;
  response.text = mock_match(script_, request.user);
  response.usage.prompt_tokens = text::count_words(request.system) + text::count_words(request.user);
  response.usage.completion_tokens = text::count_words(response.text);
  return response;
}

std::vector<CompletionRequest> MockBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

}  // namespace lp
