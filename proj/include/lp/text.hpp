// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lp::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::vector<std::string> split_lines(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);
/// Rough token count (whitespace separated words); used for mock usage stats.
int count_words(std::string_view s);

}  // namespace lp::text
