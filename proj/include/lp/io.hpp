// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lp::io {

/// Whole file as bytes. Throws LoadError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames over the target, so readers
/// see either the old content or the new one. Throws CheckpointError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace lp::io
