// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// The learning loop: predict a batch with the current program, collect the
// wrong examples, turn them into K revision candidates, verify each by a
// pseudo-update on the validation set, accept the best one that clears the
// gate, and periodically compress the whole program.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lp/backend.hpp"
#include "lp/data.hpp"
#include "lp/error.hpp"
#include "lp/grading.hpp"
#include "lp/model.hpp"
#include "lp/prompts.hpp"

namespace lp {

/// Everything the phases share. References must outlive the calls.
struct TrainEnv {
  const Task& task;
  const TrainerConfig& config;
  Backend& backend;
  const PromptBundle& prompts;
};

struct Prediction {
  Sample sample;
  std::string output;
  GradeResult grade;
};

struct BatchOutcome {
  int step = 0;
  std::vector<Prediction> predictions;  // batch order
  std::vector<WrongExample> wrong;      // d' <= d
  double batch_accuracy = 0.0;
};

/// One guided completion per sample at gen_temperature, fanned out up to
/// max_concurrency. Any backend error aborts the whole batch.
BatchOutcome predict_batch(std::span<const Sample> batch, const Program& program,
                           const TrainEnv& env, int step = 0);

/// Exactly the incorrect predictions, extraction failures included.
std::vector<WrongExample> collect_wrong_examples(const BatchOutcome& outcome);

/// Draws min(m, |wrong|) wrong examples with `rng`, asks for a revision and
/// then for its compression. std::nullopt when either completion is empty
/// or fails. `index` is passed on as the request seed hint.
std::optional<RevisionCandidate> generate_candidate(std::span<const WrongExample> wrong,
                                                    const Program& program, const TrainEnv& env,
                                                    Rng& rng, int index = 0);

/// Guided-inference accuracy of `program` over `samples`.
double program_accuracy(const Program& program, std::span<const Sample> samples,
                        const TrainEnv& env);

/// Pseudo-update: scores program + candidate.compressed on the validation
/// set without touching `program`. Backend failures leave verified=false.
RevisionCandidate verify_candidate(RevisionCandidate candidate, const Program& program,
                                   std::span<const Sample> validation, const TrainEnv& env);

/// Mean of the last `window` entries (fewer if fewer exist).
double recent_average(std::span<const double> recorded_perfs, int window);

/// Index of the verified candidate with the highest accuracy among those at
/// or above recent_average + threshold; earliest wins ties.
std::optional<std::size_t> select_revision(std::span<const RevisionCandidate> candidates,
                                           std::span<const double> recorded_perfs,
                                           const TrainerConfig& config);

/// Appends the accepted revision, records its accuracy, resets stagnation
/// and bumps updates_since_compression. When run_dir is non-empty the new
/// state is checkpointed before it is returned.
TrainState update_program(const TrainState& state, const RevisionCandidate& accepted,
                          const TrainerConfig& config, const std::filesystem::path& run_dir);

/// Tries up to compression_max_attempts summaries of the whole program and
/// keeps the first whose validation accuracy is within compression_tolerance
/// of the last recorded one. The counter is reset either way.
TrainState compress_program(const TrainState& state, std::span<const Sample> validation,
                            const TrainEnv& env, const std::filesystem::path& run_dir);

struct StopDecision {
  bool stop = false;
  StopReason reason = StopReason::none;
};

StopDecision should_stop(const TrainState& state, const TrainerConfig& config);

struct TrainOptions {
  bool resume = false;
  /// Pause (stop_reason=manual) after this many batches in this call.
  std::optional<int> max_batches;
  std::function<void(const BatchOutcome&, const TrainState&)> on_batch;
};

/// Raised when the loop cannot continue; the run directory holds the last
/// consistent checkpoint.
class TrainingAborted : public Error {
 public:
  using Error::Error;
};

/// Train/test split plus the frozen validation carve-out for a run.
SplitPlan plan_run_split(const Dataset& dataset, const TrainerConfig& config,
                         std::optional<std::size_t> official_train_count = std::nullopt);

TrainState train(const Task& task, const Dataset& dataset, const SplitPlan& plan,
                 const TrainerConfig& config, Backend& backend,
                 const std::filesystem::path& run_dir, const TrainOptions& options = {},
                 const PromptBundle& prompts = PromptBundle::defaults());

}  // namespace lp
