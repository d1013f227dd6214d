// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Helpers shared by the unit and acceptance tests.

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "lp/data.hpp"
#include "lp/mock_backend.hpp"
#include "lp/model.hpp"

namespace lp::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline MockRule rule(std::string match, std::string response, std::optional<int> max_uses = {}) {
  MockRule r;
  r.kind = MatchKind::substring;
  r.match = std::move(match);
  r.response = std::move(response);
  r.max_uses = max_uses;
  return r;
}

inline MockRule rule_all(std::vector<std::string> all, std::string response,
                         std::optional<int> max_uses = {}) {
  MockRule r;
  r.kind = MatchKind::all_of;
  r.all = std::move(all);
  r.response = std::move(response);
  r.max_uses = max_uses;
  return r;
}

inline MockRule fallback(std::string response) {
  MockRule r;
  r.kind = MatchKind::regex;
  r.match = "[\\s\\S]";
  r.response = std::move(response);
  return r;
}

/// Samples "Q<i>: what is token <i>?" whose label is the number i.
inline std::vector<Sample> numbered_samples(int n, int offset = 0) {
  std::vector<Sample> out;
  for (int i = offset; i < offset + n; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.question = "[item-" + std::to_string(i) + "] What number is tagged here?";
    s.answer = std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

inline Task numeric_task(std::string name = "numbers") {
  Task t;
  t.name = std::move(name);
  t.answer_kind = AnswerKind::numeric;
  return t;
}

inline std::string item_tag(int i) { return "[item-" + std::to_string(i) + "]"; }

/// Rules that make any prompt containing `token` answer items
/// [first, first + count) correctly.
inline std::vector<MockRule> correct_with(const std::string& token, int first, int count) {
  std::vector<MockRule> out;
  for (int i = first; i < first + count; ++i) {
    out.push_back(rule_all({token, item_tag(i)}, "So the answer is " + std::to_string(i) + "."));
  }
  return out;
}

inline MockRule always_wrong() { return fallback("I am unsure. The answer is -1."); }

/// Numbered samples split by hand: pool s0.., then validation, then test.
struct Scenario {
  Task task = numeric_task();
  Dataset dataset;
  SplitPlan plan;
  TrainerConfig config;

  Scenario(int pool, int validation, int test) {
    dataset = make_dataset(task, numbered_samples(pool + validation + test));
    for (int i = 0; i < pool + validation + test; ++i) {
      auto& part = i < pool ? plan.train_ids : i < pool + validation ? plan.validation_ids : plan.test_ids;
      part.push_back("s" + std::to_string(i));
    }
    config.batch_size = 4;
    config.validation_multiplier = 1;
    config.max_concurrency = 4;
  }
  int first_validation() const { return static_cast<int>(plan.train_ids.size()); }
  std::vector<Sample> validation() const { return dataset.select(plan.validation_ids); }
};

/// Independent last-letter oracle: slice each word's final character.
inline std::string last_letters(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += static_cast<char>(std::tolower(static_cast<unsigned char>(w.back())));
  return out;
}

}  // namespace lp::testing
