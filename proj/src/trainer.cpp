// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/trainer.hpp"

#include <fstream>
#include <mutex>
#include <numeric>

#include "lp/checkpoint.hpp"
#include "lp/error.hpp"
#include "lp/log.hpp"
#include "lp/parallel.hpp"
#include "lp/text.hpp"

namespace lp {

namespace fs = std::filesystem;

namespace {

/// Appends structured progress records to <run_dir>/events.jsonl.
class EventLog {
 public:
  explicit EventLog(fs::path path) : path_(std::move(path)) {}

  void emit(nlohmann::json record) {
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) {
      log::warn("cannot append to " + path_.string());
      return;
    }
    out << record.dump() << '\n';
  }

 private:
  fs::path path_;
};

// Script errors and rejected credentials cannot be recovered by discarding
// one candidate, so they always propagate.
bool is_fatal(const BackendError& e) {
  return dynamic_cast<const UnmatchedPromptError*>(&e) != nullptr ||
         dynamic_cast<const CredentialError*>(&e) != nullptr;
}

CompletionResponse ask(const TrainEnv& env, std::string prompt, double temperature, int max_tokens,
                       std::optional<int> seed_hint = std::nullopt) {
  CompletionRequest request;
  request.user = std::move(prompt);
  request.temperature = temperature;
  request.max_tokens = max_tokens;
  request.seed_hint = seed_hint;
  auto response = env.backend.complete(request);
  if (response.truncated()) log::warn("completion hit max_tokens; continuing with truncated text");
  return response;
}

nlohmann::json nullable(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

BatchOutcome predict_batch(std::span<const Sample> batch, const Program& program,
                           const TrainEnv& env, int step) {
  BatchOutcome outcome;
  outcome.step = step;
  outcome.predictions = parallel_map(
      batch.size(), static_cast<std::size_t>(env.config.max_concurrency), [&](std::size_t i) {
        const auto& sample = batch[i];
        const auto prompt = render_guided_inference(env.task, program, sample, env.prompts);
        auto response = ask(env, prompt, env.config.gen_temperature, env.config.inference_max_tokens);
        auto graded = grade(response.text, sample.answer, env.task.answer_kind);
        return Prediction{sample, std::move(response.text), std::move(graded)};
      });
  outcome.wrong = collect_wrong_examples(outcome);
  if (!outcome.predictions.empty()) {
    const auto correct = outcome.predictions.size() - outcome.wrong.size();
    outcome.batch_accuracy =
        100.0 * static_cast<double>(correct) / static_cast<double>(outcome.predictions.size());
  }
  return outcome;
}

std::vector<WrongExample> collect_wrong_examples(const BatchOutcome& outcome) {
  std::vector<WrongExample> wrong;
  for (const auto& p : outcome.predictions) {
    if (!p.grade.correct) wrong.push_back({p.sample, p.output, p.grade.extracted});
  }
  return wrong;
}

std::optional<RevisionCandidate> generate_candidate(std::span<const WrongExample> wrong,
                                                    const Program& program, const TrainEnv& env,
                                                    Rng& rng, int index) {
  if (wrong.empty()) throw InvalidArgument("generate_candidate: empty wrong example set");
  const auto m = std::min<std::size_t>(static_cast<std::size_t>(env.config.wrong_sample_count),
                                       wrong.size());
  std::vector<WrongExample> chosen;
  RevisionCandidate candidate;
  for (auto i : rng.choose(wrong.size(), m)) {
    chosen.push_back(wrong[i]);
    candidate.seed_errors.push_back(wrong[i].sample.id);
  }

  try {
    auto raw = ask(env, render_revision(chosen, program, env.prompts), env.config.gen_temperature,
                   env.config.inference_max_tokens, index);
    candidate.raw = std::string(text::trim(raw.text));
    if (candidate.raw.empty()) {
      log::info("candidate " + std::to_string(index) + " discarded: empty revision");
      return std::nullopt;
    }
    auto compressed = ask(env,
                          render_revision_compression(candidate.raw, env.task.max_solutions,
                                                      env.prompts),
                          env.config.compress_temperature, env.config.compression_max_tokens, index);
    candidate.compressed = std::string(text::trim(compressed.text));
    if (candidate.compressed.empty()) {
      log::info("candidate " + std::to_string(index) + " discarded: empty compression");
      return std::nullopt;
    }
  } catch (const BackendError& e) {
    if (is_fatal(e)) throw;
    log::warn("candidate " + std::to_string(index) + " discarded: " + e.what());
    return std::nullopt;
  }
  return candidate;
}

double program_accuracy(const Program& program, std::span<const Sample> samples,
                        const TrainEnv& env) {
  const auto outcome = predict_batch(samples, program, env);
  std::vector<GradeResult> grades;
  grades.reserve(outcome.predictions.size());
  for (const auto& p : outcome.predictions) grades.push_back(p.grade);
  return accuracy(grades);
}

RevisionCandidate verify_candidate(RevisionCandidate candidate, const Program& program,
                                   std::span<const Sample> validation, const TrainEnv& env) {
  if (validation.empty()) throw InvalidArgument("verify_candidate: empty validation set");
  candidate.verified = false;
  if (text::trim(candidate.compressed).empty()) return candidate;
  const auto pseudo = append_revision(program, candidate.compressed);
  try {
    candidate.val_accuracy = program_accuracy(pseudo, validation, env);
    candidate.verified = true;
  } catch (const BackendError& e) {
    if (is_fatal(e)) throw;
    log::warn(std::string("candidate verification failed: ") + e.what());
  }
  return candidate;
}

double recent_average(std::span<const double> recorded_perfs, int window) {
  if (recorded_perfs.empty()) return 0.0;
  const auto n = std::min<std::size_t>(recorded_perfs.size(), static_cast<std::size_t>(std::max(window, 1)));
  const auto tail = recorded_perfs.last(n);
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(n);
}

std::optional<std::size_t> select_revision(std::span<const RevisionCandidate> candidates,
                                           std::span<const double> recorded_perfs,
                                           const TrainerConfig& config) {
  const double gate = recent_average(recorded_perfs, config.recent_window) + config.improvement_threshold;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.verified || c.val_accuracy < gate) continue;
    if (!best || c.val_accuracy > candidates[*best].val_accuracy) best = i;
  }
  return best;
}

TrainState update_program(const TrainState& state, const RevisionCandidate& accepted,
                          const TrainerConfig& config, const fs::path& run_dir) {
  if (!accepted.verified) throw InvalidArgument("update_program: candidate was not verified");
  TrainState next = state;
  const double gate = recent_average(state.recorded_perfs, config.recent_window) +
                      config.improvement_threshold;
  next.program = append_revision(state.program, accepted.compressed);
  next.recorded_perfs.push_back(accepted.val_accuracy);
  next.stagnant_batches = 0;
  ++next.updates_since_compression;
  next.history.push_back({HistoryRecord::Kind::revision, state.step + 1, accepted.raw,
                          accepted.compressed, accepted.val_accuracy, gate});
  if (!run_dir.empty()) save_checkpoint(next, run_dir);
  return next;
}

TrainState compress_program(const TrainState& state, std::span<const Sample> validation,
                            const TrainEnv& env, const fs::path& run_dir) {
  if (state.program.empty()) throw InvalidArgument("compress_program: program is empty");
  if (state.recorded_perfs.empty()) throw InvalidArgument("compress_program: no recorded accuracy");
  EventLog events(run_dir.empty() ? fs::path{} : run_dir / "events.jsonl");
  TrainState next = state;
  const double gate = state.recorded_perfs.back() - env.config.compression_tolerance;
  const auto original_len = state.program.rendered().size();

  for (int attempt = 1; attempt <= env.config.compression_max_attempts; ++attempt) {
    std::optional<double> acc;
    std::string summary;
    try {
      const auto prompt = render_program_compression(state.program, env.task.max_solutions, env.prompts);
      auto response = ask(env, prompt, env.config.compress_temperature,
                          env.config.compression_max_tokens, attempt);
      summary = std::string(text::trim(response.text));
      if (!summary.empty()) {
        acc = program_accuracy(replace_with_compressed(state.program, summary), validation, env);
      }
    } catch (const BackendError& e) {
      if (is_fatal(e)) throw;
      log::warn("compression attempt " + std::to_string(attempt) + " failed: " + e.what());
    }
    const bool accepted = acc && *acc >= gate;
    events.emit({{"event", "compress"},
                 {"step", state.step + 1},
                 {"attempt", attempt},
                 {"val_accuracy", nullable(acc)},
                 {"gate", gate},
                 {"accepted", accepted}});
    if (!accepted) continue;

    next.program = replace_with_compressed(state.program, summary);
    next.recorded_perfs.push_back(*acc);
    next.updates_since_compression = 0;
    next.history.push_back(
        {HistoryRecord::Kind::compression, state.step + 1, summary, summary, *acc, gate});
    log::info("program compressed from " + std::to_string(original_len) + " to " +
              std::to_string(summary.size()) + " chars (val " + format_percent(*acc) + ")");
    if (!run_dir.empty()) save_checkpoint(next, run_dir);
    return next;
  }

  log::info("program compression exhausted its attempts; keeping the original");
  next.updates_since_compression = 0;
  if (!run_dir.empty()) save_checkpoint(next, run_dir);
  return next;
}

StopDecision should_stop(const TrainState& state, const TrainerConfig& config) {
  if (state.stagnant_batches >= config.stagnation_limit) return {true, StopReason::stagnation};
  if (state.epoch >= config.epochs) return {true, StopReason::epochs_exhausted};
  return {};
}

SplitPlan plan_run_split(const Dataset& dataset, const TrainerConfig& config,
                         std::optional<std::size_t> official_train_count) {
  const auto base = official_train_count
                        ? official_split(dataset, *official_train_count)
                        : split_dataset(dataset, dataset.task.split_ratio, config.rng_seed);
  return sample_validation(base, static_cast<std::size_t>(config.validation_size()), config.rng_seed);
}

TrainState train(const Task& task, const Dataset& dataset, const SplitPlan& plan,
                 const TrainerConfig& config, Backend& backend, const fs::path& run_dir,
                 const TrainOptions& options, const PromptBundle& prompts) {
  config.validate();
  task.validate();
  if (plan.validation_ids.empty()) throw SplitError("training needs a non-empty validation set");
  if (plan.train_ids.empty()) throw SplitError("training needs a non-empty batching pool");

  const TrainEnv env{task, config, backend, prompts};
  const auto validation = dataset.select(plan.validation_ids);
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  if (ec) throw CheckpointError("cannot create run directory " + run_dir.string() + ": " + ec.message());
  EventLog events(run_dir / "events.jsonl");

  TrainState state;
  if (options.resume) {
    state = load_checkpoint(run_dir);
    state.validate(config);
    if (state.task != task.name) {
      throw LoadError("checkpoint in " + run_dir.string() + " belongs to task '" + state.task + "'");
    }
    if (state.stopped && state.stop_reason != StopReason::manual) {
      log::info("run already finished (" + std::string(to_string(state.stop_reason)) + ")");
      return state;
    }
    state.stopped = false;
    state.stop_reason = StopReason::none;
    log::info("resuming at step " + std::to_string(state.step) + ", epoch " + std::to_string(state.epoch));
  } else {
    state.task = task.name;
    state.program.origin_model = backend.model_name();
    state.rng = Rng(config.rng_seed);
    const double baseline = program_accuracy(state.program, validation, env);
    state.recorded_perfs = {baseline};
    events.emit({{"event", "baseline"}, {"val_accuracy", baseline}});
    log::info("baseline validation accuracy " + format_percent(baseline));
    save_checkpoint(state, run_dir);
  }

  auto finish = [&](StopReason reason) {
    state.stopped = true;
    state.stop_reason = reason;
    save_checkpoint(state, run_dir);
    events.emit({{"event", "stop"}, {"step", state.step}, {"reason", to_string(reason)}});
    log::info("training stopped: " + std::string(to_string(reason)) + " after " +
              std::to_string(state.step) + " batches");
    return state;
  };

  int batches_run = 0;
  for (;;) {
    if (const auto stop = should_stop(state, config); stop.stop) return finish(stop.reason);
    const auto batches = make_batches(plan.train_ids, config.batch_size, state.epoch, config.rng_seed);
    if (state.batch_in_epoch >= static_cast<int>(batches.size())) {
      ++state.epoch;
      state.batch_in_epoch = 0;
      save_checkpoint(state, run_dir);
      continue;
    }
    if (options.max_batches && batches_run >= *options.max_batches) return finish(StopReason::manual);

    const auto batch = dataset.select(batches[static_cast<std::size_t>(state.batch_in_epoch)]);
    const int t = state.step + 1;
    TrainState working = state;
    BatchOutcome outcome;
    try {
      outcome = predict_batch(batch, working.program, env, t);
      bool accepted = false;
      if (!outcome.wrong.empty()) {
        std::vector<RevisionCandidate> candidates;
        for (int k = 0; k < config.candidate_count; ++k) {
          auto c = generate_candidate(outcome.wrong, working.program, env, working.rng, k);
          if (c) candidates.push_back(std::move(*c));
        }
        for (auto& c : candidates) c = verify_candidate(std::move(c), working.program, validation, env);

        const double recent = recent_average(working.recorded_perfs, config.recent_window);
        const auto chosen = select_revision(candidates, working.recorded_perfs, config);
        nlohmann::json accs = nlohmann::json::array();
        for (const auto& c : candidates) {
          accs.push_back(c.verified ? nlohmann::json(c.val_accuracy) : nlohmann::json(nullptr));
        }
        events.emit({{"event", "candidates"},
                     {"step", t},
                     {"accuracies", accs},
                     {"recent_avg", recent},
                     {"gate", recent + config.improvement_threshold},
                     {"chosen", chosen ? nlohmann::json(*chosen) : nlohmann::json(nullptr)}});
        if (chosen) {
          working = update_program(working, candidates[*chosen], config, run_dir);
          accepted = true;
          log::info("step " + std::to_string(t) + ": accepted revision (val " +
                    format_percent(candidates[*chosen].val_accuracy) + ")");
          if (working.updates_since_compression >= config.compression_every_updates) {
            working = compress_program(working, validation, env, run_dir);
          }
        }
      }
      if (!accepted) ++working.stagnant_batches;
    } catch (const BackendError& e) {
      save_checkpoint(state, run_dir);
      throw TrainingAborted("training aborted at step " + std::to_string(t) + ": " + e.what() +
                            "\nresume with: lp train --resume " + run_dir.string());
    }

    events.emit({{"event", "batch"},
                 {"step", t},
                 {"epoch", working.epoch},
                 {"size", outcome.predictions.size()},
                 {"wrong", outcome.wrong.size()},
                 {"batch_accuracy", outcome.batch_accuracy},
                 {"stagnant_batches", working.stagnant_batches},
                 {"updated", working.stagnant_batches == 0}});

    working.step = t;
    ++working.batch_in_epoch;
    if (working.batch_in_epoch >= static_cast<int>(batches.size())) {
      ++working.epoch;
      working.batch_in_epoch = 0;
    }
    state = std::move(working);
    save_checkpoint(state, run_dir);
    ++batches_run;
    if (options.on_batch) options.on_batch(outcome, state);
  }
}

}  // namespace lp
