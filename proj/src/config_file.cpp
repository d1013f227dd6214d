// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/config_file.hpp"

#include <cctype>

#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/text.hpp"

namespace lp {

namespace fs = std::filesystem;

namespace {

class ValueParser {
 public:
  ValueParser(std::string_view s, std::string where) : s_(s), where_(std::move(where)) {}

  nlohmann::json parse_all() {
    auto v = value();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  nlohmann::json value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    return scalar();
  }

  nlohmann::json basic_string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json literal_string() {
    const auto close = s_.find('\'', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated string");
    std::string out(s_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return out;
  }

  nlohmann::json array() {
    ++pos_;
    auto out = nlohmann::json::array();
    for (;;) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail("expected ',' or ']' in array");
    }
  }

  nlohmann::json scalar() {
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    std::string token(s_.substr(start, pos_ - start));
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char c : token) {
      if (c != '_') digits += c;
    }
    try {
      std::size_t used = 0;
      if (digits.find_first_of(".eE") == std::string::npos) {
        const long long v = std::stoll(digits, &used);
        if (used == digits.size()) return v;
      } else {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + token + "'");
  }

  std::string_view s_;
  std::string where_;
  std::size_t pos_ = 0;
};

bool is_bare_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text, std::string_view source) {
  auto root = nlohmann::json::object();
  nlohmann::json* table = &root;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(text)) {
    ++line_no;
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string_view::npos) throw ConfigError(where + ": unterminated table header");
      const auto name = std::string(text::trim(line.substr(1, close - 1)));
      if (!is_bare_key(name)) throw ConfigError(where + ": unsupported table name '" + name + "'");
      if (root.contains(name)) throw ConfigError(where + ": duplicate table '" + name + "'");
      root[name] = nlohmann::json::object();
      table = &root[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const auto key = std::string(text::trim(line.substr(0, eq)));
    if (!is_bare_key(key)) throw ConfigError(where + ": unsupported key '" + key + "'");
    if (table->contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    (*table)[key] = ValueParser(line.substr(eq + 1), where).parse_all();
  }
  return root;
}

nlohmann::json load_config_file(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  const auto body = io::read_file(path);
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return parse_toml_subset(body, path.string());
}

std::vector<Demo> load_demos(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("demo file not found: " + path.string());
  std::vector<Demo> demos;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(io::read_file(path))) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      demos.push_back({j.at("question").get<std::string>(), j.at("solution").get<std::string>(),
                       j.at("answer").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return demos;
}

TaskConfig load_task_config(const fs::path& path) {
  const auto j = load_config_file(path);
  const auto base = path.parent_path();
  TaskConfig c;
  try {
    c.task.name = j.at("name").get<std::string>();
    c.task.answer_kind = parse_answer_kind(j.at("answer_kind").get<std::string>());
    c.task.prompt_mode = parse_prompt_mode(j.value("prompt_mode", std::string{"zero_shot_cot"}));
    c.task.max_solutions = j.value("max_solutions", 5);
    if (j.contains("split_ratio")) c.task.split_ratio = parse_split_ratio(j.at("split_ratio").get<std::string>());
    if (j.contains("demos")) c.task.demos = load_demos(resolve(base, j.at("demos").get<std::string>()));
    if (j.contains("data")) c.data = resolve(base, j.at("data").get<std::string>());
    if (j.contains("train")) c.train = resolve(base, j.at("train").get<std::string>());
    if (j.contains("test")) c.test = resolve(base, j.at("test").get<std::string>());
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("trainer")) c.trainer = j.at("trainer");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (c.train.has_value() != c.test.has_value()) {
    throw ConfigError(path.string() + ": 'train' and 'test' must be given together");
  }
  c.task.validate();
  return c;
}

}  // namespace lp
