// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Run directory layout:
//   program.txt     Program::rendered(), byte exact
//   state.json      everything else in TrainState
//   history.jsonl   one record per accepted revision or compression
//   reports/        evaluation reports (written by the evaluation module)

#pragma once

#include <filesystem>

#include "lp/model.hpp"

namespace lp {

inline constexpr const char* kProgramFile = "program.txt";
inline constexpr const char* kStateFile = "state.json";
inline constexpr const char* kHistoryFile = "history.jsonl";
inline constexpr const char* kReportsDir = "reports";

/// Every file goes through write-temp-then-rename; state.json is written
/// last and is the commit point. Throws CheckpointError.
void save_checkpoint(const TrainState& state, const std::filesystem::path& dir);

/// Throws LoadError naming the offending file.
TrainState load_checkpoint(const std::filesystem::path& dir);

}  // namespace lp
