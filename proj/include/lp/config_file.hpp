// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "lp/model.hpp"

namespace lp {

/// Parses the TOML subset used by task files: comments, [section] headers
/// (one level), and `key = value` with basic/literal strings, integers,
/// floats, booleans or single-line arrays of those. Sections become nested
/// objects. Throws ConfigError with source:line on anything else.
nlohmann::json parse_toml_subset(std::string_view text, std::string_view source = "<string>");

/// .json files are parsed as JSON, everything else as the TOML subset.
nlohmann::json load_config_file(const std::filesystem::path& path);

struct TaskConfig {
  Task task;
  std::optional<std::filesystem::path> data;   // single file, split by ratio
  std::optional<std::filesystem::path> train;  // official split files
  std::optional<std::filesystem::path> test;
  std::uint64_t seed = 0;
  nlohmann::json trainer = nlohmann::json::object();  // TrainerConfig overrides
};

/// Relative paths in the file resolve against the file's directory.
TaskConfig load_task_config(const std::filesystem::path& path);

std::vector<Demo> load_demos(const std::filesystem::path& path);

}  // namespace lp
