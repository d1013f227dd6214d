// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Guided-inference evaluation over a split, the self-program and transfer
// variants, and the report files under <run_dir>/reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lp/backend.hpp"
#include "lp/model.hpp"
#include "lp/prompts.hpp"

namespace lp {

struct EvalOptions {
  EvalMode mode = EvalMode::baseline;
  SplitKind split = SplitKind::test;
  int max_concurrency = 8;
  int max_tokens = 1024;
  std::optional<std::string> program_source_model;
  PromptBundle prompts = PromptBundle::defaults();
};

/// One temperature-0 guided completion per sample, graded in sample order.
/// A backend error discards everything; rerun against a warm cache.
EvalReport evaluate(const Task& task, std::span<const Sample> samples, const Program& program,
                    Backend& backend, const EvalOptions& options = {});

struct SelfProgramResult {
  Program program;  // empty in the zero-shot variant, see per_sample.program
  EvalReport report;
};

inline constexpr int kSelfProgramShots = 4;
inline constexpr int kSelfProgramMaxTokens = 1024;

/// Zero-shot: each test sample gets its own generated program, then guided
/// inference with it (two calls per sample). Few-shot: four training samples
/// drawn with `seed` each yield a program, the four are concatenated and
/// compressed once, and the result guides every test sample.
SelfProgramResult run_self_program(const Task& task, std::span<const Sample> test_samples,
                                   Backend& backend, bool few_shot,
                                   std::span<const Sample> train_samples = {},
                                   std::uint64_t seed = 0, EvalOptions options = {});

struct LoadedProgram {
  Program program;
  std::string source_model;  // "unknown" for a bare text file
};

/// Accepts a run directory (its checkpoint) or a program text file.
LoadedProgram load_program_source(const std::filesystem::path& source);

/// Evaluates a program learned elsewhere on `target`. Throws InvalidArgument
/// for an empty program and LoadError for a missing checkpoint.
EvalReport run_transfer(const std::filesystem::path& source, Backend& target, const Task& task,
                        std::span<const Sample> samples, EvalOptions options = {});

struct ComparisonRow {
  std::string label;  // column name in the summary table
  EvalMode mode = EvalMode::baseline;
  std::string model;
  double accuracy = 0.0;
  int n = 0;

  bool operator==(const ComparisonRow&) const = default;
};

struct RunComparison {
  std::string task;
  std::vector<ComparisonRow> rows;
  std::vector<double> deltas;  // rows[i].accuracy - rows[0].accuracy

  bool operator==(const RunComparison&) const = default;
};

std::string column_label(const EvalReport& report);

/// Groups reports by task, preserving first-seen order of tasks and rows.
std::vector<RunComparison> compare(std::span<const EvalReport> reports);

/// reports/<task>-<mode>.json, pretty-printed. Returns the path written.
std::filesystem::path write_report(const EvalReport& report, const std::filesystem::path& run_dir);

/// Every per-run report under reports/, ordered by file name.
std::vector<EvalReport> load_reports(const std::filesystem::path& run_dir);

/// The markdown table: one row per task, an Avg row, and delta columns
/// against the first column when there are at least two columns.
std::string render_summary_table(std::span<const RunComparison> comparisons);

/// Writes reports/summary.json and reports/summary.md. Throws
/// InvalidArgument when `comparisons` is empty.
void emit_report(std::span<const RunComparison> comparisons, const std::filesystem::path& run_dir);

}  // namespace lp
