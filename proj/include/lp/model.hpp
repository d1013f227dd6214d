// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Domain value types shared by every stage of the learning loop.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lp/rng.hpp"

namespace lp {

enum class AnswerKind {
  fraction,
  mixed_number,
  numeric,
  sig_figs_count,
  multiple_choice,
  letter_concat,
  action_sequence,
  free_text,
};

enum class PromptMode { zero_shot_cot, few_shot_cot };

std::string_view to_string(AnswerKind kind);
std::string_view to_string(PromptMode mode);
AnswerKind parse_answer_kind(std::string_view text);
PromptMode parse_prompt_mode(std::string_view text);

struct Sample {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<std::string> choices;  // empty unless multiple choice
  std::map<std::string, std::string> meta;

  bool operator==(const Sample&) const = default;
};

struct Demo {
  std::string question;
  std::string solution;
  std::string answer;

  bool operator==(const Demo&) const = default;
};

struct SplitRatio {
  int train = 3;
  int test = 1;

  bool operator==(const SplitRatio&) const = default;
};

SplitRatio parse_split_ratio(std::string_view text);  // "3:1"

struct Task {
  std::string name;
  AnswerKind answer_kind = AnswerKind::free_text;
  PromptMode prompt_mode = PromptMode::zero_shot_cot;
  std::vector<Demo> demos;
  int max_solutions = 5;
  SplitRatio split_ratio;

  /// Throws ConfigError when demo count or max_solutions are out of policy.
  void validate() const;
};

/// The learned natural-language program: an ordered list of text blocks.
struct Program {
  std::vector<std::string> blocks;
  std::string origin_model;
  int history_len = 0;  // accepted revisions ever, survives compression

  /// Blocks joined by exactly one blank line; "" for an empty program.
  std::string rendered() const;
  bool empty() const { return blocks.empty(); }

  bool operator==(const Program&) const = default;
};

/// p_t = p_{t-1} + revision. Throws InvalidArgument on blank revision text.
Program append_revision(const Program& program, std::string_view revision_text);

/// Replaces every block with a single compressed block.
Program replace_with_compressed(const Program& program, std::string_view compressed_text);

struct WrongExample {
  Sample sample;
  std::string prediction;  // full model output
  std::string extracted;   // may be empty when extraction failed

  bool operator==(const WrongExample&) const = default;
};

struct RevisionCandidate {
  std::string raw;
  std::string compressed;
  double val_accuracy = 0.0;
  bool verified = false;
  std::vector<std::string> seed_errors;  // ids of the wrong examples used
};

struct TrainerConfig {
  int epochs = 10;
  int batch_size = 32;
  int validation_multiplier = 5;
  int wrong_sample_count = 3;   // m
  int candidate_count = 5;      // K
  double improvement_threshold = 1.0;  // percentage points
  int recent_window = 3;
  int stagnation_limit = 10;
  int compression_every_updates = 3;
  double compression_tolerance = 1.0;  // percentage points
  int compression_max_attempts = 3;
  double gen_temperature = 0.0;
  double compress_temperature = 0.6;
  int inference_max_tokens = 1024;
  int compression_max_tokens = 2048;
  int max_concurrency = 8;
  std::uint64_t rng_seed = 0;

  int validation_size() const { return validation_multiplier * batch_size; }

  /// Throws ConfigError on counts < 1, temperatures outside [0,2] or a
  /// negative threshold.
  void validate() const;

  bool operator==(const TrainerConfig&) const = default;
};

enum class StopReason { none, stagnation, epochs_exhausted, manual };

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view text);

/// One line of history.jsonl.
struct HistoryRecord {
  enum class Kind { revision, compression };

  Kind kind = Kind::revision;
  int step = 0;
  std::string raw;
  std::string compressed;
  double val_accuracy = 0.0;
  double gate = 0.0;  // accuracy the record had to reach to be accepted

  bool operator==(const HistoryRecord&) const = default;
};

struct TrainState {
  std::string task;
  int step = 0;            // batches processed so far
  int epoch = 0;
  int batch_in_epoch = 0;  // next batch to run within the current epoch
  Program program;
  std::vector<double> recorded_perfs;
  int stagnant_batches = 0;
  int updates_since_compression = 0;
  Rng rng;
  bool stopped = false;
  StopReason stop_reason = StopReason::none;
  std::vector<HistoryRecord> history;

  /// Throws CheckpointError naming the violated invariant.
  void validate(const TrainerConfig& config) const;

  bool operator==(const TrainState&) const = default;
};

enum class EvalMode { baseline, self_program, lp, transfer };
enum class SplitKind { train, validation, test };

std::string_view to_string(EvalMode mode);
std::string_view to_string(SplitKind split);
EvalMode parse_eval_mode(std::string_view text);
SplitKind parse_split_kind(std::string_view text);

struct SampleResult {
  std::string id;
  std::string extracted;
  bool correct = false;
  std::string output;
  std::string program;  // per-sample program (zero-shot self-program only)

  bool operator==(const SampleResult&) const = default;
};

struct EvalReport {
  std::string task;
  EvalMode mode = EvalMode::baseline;
  std::string backend_model;
  std::optional<std::string> program_source_model;
  SplitKind split = SplitKind::test;
  double accuracy = 0.0;
  int n = 0;
  std::vector<SampleResult> per_sample;
  std::string program;  // rendered program that guided the run
  long long prompt_tokens = 0;
  long long completion_tokens = 0;

  /// 100 * correct / n recomputed from per_sample.
  double recomputed_accuracy() const;

  bool operator==(const EvalReport&) const = default;
};

nlohmann::json to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainerConfig& config);
TrainerConfig trainer_config_from_json(const nlohmann::json& j, TrainerConfig base = {});
nlohmann::json to_json(const HistoryRecord& record);
HistoryRecord history_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

/// Percentage shown with one decimal, as in the result tables.
std::string format_percent(double value);

}  // namespace lp
