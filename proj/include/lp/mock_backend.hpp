// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scripted stand-in for a chat model. A script is an ordered rule list; the
// first rule whose matcher hits (and whose use budget is not spent) answers.

#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "lp/backend.hpp"

namespace lp {

enum class MatchKind {
  substring,  // prompt contains `match`
  regex,      // ECMAScript regex_search
  all_of,     // prompt contains every entry of `all`
};

struct MockRule {
  MatchKind kind = MatchKind::substring;
  std::string match;
  std::vector<std::string> all;  // all_of only
  std::string response;
  std::optional<int> max_uses;   // unlimited when empty
};

class MockScript {
 public:
  MockScript() = default;
  explicit MockScript(std::vector<MockRule> rules);

  /// JSON array of rule records, or one record per line.
  static MockScript from_file(const std::filesystem::path& path);
  static MockScript from_json(const nlohmann::json& records);

  const std::vector<MockRule>& rules() const { return rules_; }
  std::optional<int> remaining(std::size_t rule) const { return remaining_.at(rule); }

 private:
  friend std::string mock_match(MockScript& script, std::string_view prompt);

  std::vector<MockRule> rules_;
  std::vector<std::optional<std::regex>> compiled_;
  std::vector<std::optional<int>> remaining_;
};

/// Fires the first live matching rule and spends one of its uses.
/// Throws UnmatchedPromptError carrying the prompt when nothing matches.
std::string mock_match(MockScript& script, std::string_view prompt);

nlohmann::json to_json(const MockRule& rule);

/// Deterministic backend over a MockScript. Never touches the network and
/// records every request it sees.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script, std::string model = "mock");

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string model_name() const override { return model_; }
  std::string endpoint() const override { return "mock://local"; }

  std::vector<CompletionRequest> calls() const;
  std::size_t call_count() const;

 private:
  std::string model_;
  mutable std::mutex mutex_;
  MockScript script_;
  std::vector<CompletionRequest> calls_;
};

}  // namespace lp
