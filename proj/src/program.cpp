// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <cstdio>

#include "lp/error.hpp"
#include "lp/model.hpp"
#include "lp/text.hpp"

namespace lp {
namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<std::pair<E, std::string_view>, N>& table,
             std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  throw ConfigError("unknown " + std::string(what) + ": '" + std::string(text) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<AnswerKind, std::string_view>, 8> kAnswerKinds{{
    {AnswerKind::fraction, "fraction"},
    {AnswerKind::mixed_number, "mixed_number"},
    {AnswerKind::numeric, "numeric"},
    {AnswerKind::sig_figs_count, "sig_figs_count"},
    {AnswerKind::multiple_choice, "multiple_choice"},
    {AnswerKind::letter_concat, "letter_concat"},
    {AnswerKind::action_sequence, "action_sequence"},
    {AnswerKind::free_text, "free_text"},
}};

constexpr std::array<std::pair<PromptMode, std::string_view>, 2> kPromptModes{{
    {PromptMode::zero_shot_cot, "zero_shot_cot"},
    {PromptMode::few_shot_cot, "few_shot_cot"},
}};

constexpr std::array<std::pair<StopReason, std::string_view>, 4> kStopReasons{{
    {StopReason::none, "none"},
    {StopReason::stagnation, "stagnation"},
    {StopReason::epochs_exhausted, "epochs_exhausted"},
    {StopReason::manual, "manual"},
}};

constexpr std::array<std::pair<EvalMode, std::string_view>, 4> kEvalModes{{
    {EvalMode::baseline, "baseline"},
    {EvalMode::self_program, "self_program"},
    {EvalMode::lp, "lp"},
    {EvalMode::transfer, "transfer"},
}};

constexpr std::array<std::pair<SplitKind, std::string_view>, 3> kSplitKinds{{
    {SplitKind::train, "train"},
    {SplitKind::validation, "validation"},
    {SplitKind::test, "test"},
}};

}  // namespace

std::string_view to_string(AnswerKind kind) { return enum_name(kind, kAnswerKinds); }
std::string_view to_string(PromptMode mode) { return enum_name(mode, kPromptModes); }
std::string_view to_string(StopReason reason) { return enum_name(reason, kStopReasons); }
std::string_view to_string(EvalMode mode) { return enum_name(mode, kEvalModes); }
std::string_view to_string(SplitKind split) { return enum_name(split, kSplitKinds); }

AnswerKind parse_answer_kind(std::string_view text) {
  return parse_enum(text, kAnswerKinds, "answer_kind");
}
PromptMode parse_prompt_mode(std::string_view text) {
  return parse_enum(text, kPromptModes, "prompt_mode");
}
StopReason parse_stop_reason(std::string_view text) {
  return parse_enum(text, kStopReasons, "stop_reason");
}
EvalMode parse_eval_mode(std::string_view text) { return parse_enum(text, kEvalModes, "mode"); }
SplitKind parse_split_kind(std::string_view text) { return parse_enum(text, kSplitKinds, "split"); }

SplitRatio parse_split_ratio(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("split ratio must look like 3:1, got '" + std::string(text) + "'");
  }
  SplitRatio r;
  try {
    r.train = std::stoi(std::string(text.substr(0, colon)));
    r.test = std::stoi(std::string(text.substr(colon + 1)));
  } catch (const std::exception&) {
    throw ConfigError("split ratio must look like 3:1, got '" + std::string(text) + "'");
  }
  if (r.train <= 0 || r.test <= 0) throw ConfigError("split ratio terms must be positive");
  return r;
}

void Task::validate() const {
  if (name.empty()) throw ConfigError("task name is empty");
  if (max_solutions != 5 && max_solutions != 10) {
    throw ConfigError("max_solutions must be 5 or 10, got " + std::to_string(max_solutions));
  }
  if (prompt_mode == PromptMode::few_shot_cot && demos.size() != 4 && demos.size() != 6) {
    throw ConfigError("few-shot task '" + name + "' needs 4 or 6 demos, got " +
                      std::to_string(demos.size()));
  }
  if (prompt_mode == PromptMode::zero_shot_cot && !demos.empty()) {
    throw ConfigError("zero-shot task '" + name + "' must not carry demos");
  }
  if (split_ratio.train <= 0 || split_ratio.test <= 0) {
    throw ConfigError("split ratio terms must be positive");
  }
}

std::string Program::rendered() const {
  std::string out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += "\n\n";
    out += blocks[i];
  }
  return out;
}

Program append_revision(const Program& program, std::string_view revision_text) {
  if (text::trim(revision_text).empty()) {
    throw InvalidArgument("append_revision: revision text is empty");
  }
  Program next = program;
  next.blocks.emplace_back(revision_text);
  ++next.history_len;
  return next;
}

Program replace_with_compressed(const Program& program, std::string_view compressed_text) {
  if (text::trim(compressed_text).empty()) {
    throw InvalidArgument("replace_with_compressed: compressed text is empty");
  }
  Program next = program;
  next.blocks.assign(1, std::string(compressed_text));
  return next;
}

void TrainerConfig::validate() const {
  const std::array<std::pair<int, std::string_view>, 11> counts{{
      {epochs, "epochs"},
      {batch_size, "batch_size"},
      {validation_multiplier, "validation_multiplier"},
      {wrong_sample_count, "wrong_sample_count"},
      {candidate_count, "candidate_count"},
      {recent_window, "recent_window"},
      {stagnation_limit, "stagnation_limit"},
      {compression_every_updates, "compression_every_updates"},
      {compression_max_attempts, "compression_max_attempts"},
      {max_concurrency, "max_concurrency"},
      {inference_max_tokens, "inference_max_tokens"},
  }};
  for (const auto& [value, name] : counts) {
    if (value < 1) throw ConfigError(std::string(name) + " must be >= 1");
  }
  if (compression_max_tokens < 1) throw ConfigError("compression_max_tokens must be >= 1");
  for (double t : {gen_temperature, compress_temperature}) {
    if (t < 0.0 || t > 2.0) throw ConfigError("temperatures must lie in [0, 2]");
  }
  if (improvement_threshold < 0.0) throw ConfigError("improvement_threshold must be >= 0");
  if (compression_tolerance < 0.0) throw ConfigError("compression_tolerance must be >= 0");
}

void TrainState::validate(const TrainerConfig& config) const {
  if (recorded_perfs.empty()) throw CheckpointError("state: recorded_perfs is empty");
  for (double p : recorded_perfs) {
    if (p < 0.0 || p > 100.0) throw CheckpointError("state: recorded accuracy out of [0,100]");
  }
  if (stagnant_batches < 0 || stagnant_batches > config.stagnation_limit) {
    throw CheckpointError("state: stagnant_batches exceeds stagnation_limit");
  }
  if (stopped && stop_reason == StopReason::none) {
    throw CheckpointError("state: stopped without a stop reason");
  }
  if (step < 0 || epoch < 0 || batch_in_epoch < 0 || updates_since_compression < 0) {
    throw CheckpointError("state: negative counter");
  }
}

double EvalReport::recomputed_accuracy() const {
  if (per_sample.empty()) return 0.0;
  const auto correct = std::count_if(per_sample.begin(), per_sample.end(),
                                     [](const SampleResult& r) { return r.correct; });
  return 100.0 * static_cast<double>(correct) / static_cast<double>(per_sample.size());
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", value);
  return buf;
}

// ---- JSON -----------------------------------------------------------------

nlohmann::json to_json(const Sample& s) {
  nlohmann::json j{{"id", s.id}, {"question", s.question}, {"answer", s.answer}};
  if (!s.choices.empty()) j["choices"] = s.choices;
  if (!s.meta.empty()) j["meta"] = s.meta;
  return j;
}

Sample sample_from_json(const nlohmann::json& j) {
  Sample s;
  for (const char* field : {"id", "question", "answer"}) {
    if (!j.contains(field)) throw DatasetError(std::string("missing field '") + field + "'");
    if (!j.at(field).is_string()) {
      // Labels are sometimes stored as bare numbers.
      if (j.at(field).is_number()) continue;
      throw DatasetError(std::string("field '") + field + "' must be a string");
    }
  }
  auto as_text = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  s.id = as_text(j.at("id"));
  s.question = as_text(j.at("question"));
  s.answer = as_text(j.at("answer"));
  if (j.contains("choices") && !j.at("choices").is_null()) {
    s.choices = j.at("choices").get<std::vector<std::string>>();
  }
  if (j.contains("meta") && !j.at("meta").is_null()) {
    for (const auto& [k, v] : j.at("meta").items()) s.meta[k] = as_text(v);
  }
  return s;
}

nlohmann::json to_json(const TrainerConfig& c) {
  return {
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"validation_multiplier", c.validation_multiplier},
      {"wrong_sample_count", c.wrong_sample_count},
      {"candidate_count", c.candidate_count},
      {"improvement_threshold", c.improvement_threshold},
      {"recent_window", c.recent_window},
      {"stagnation_limit", c.stagnation_limit},
      {"compression_every_updates", c.compression_every_updates},
      {"compression_tolerance", c.compression_tolerance},
      {"compression_max_attempts", c.compression_max_attempts},
      {"gen_temperature", c.gen_temperature},
      {"compress_temperature", c.compress_temperature},
      {"inference_max_tokens", c.inference_max_tokens},
      {"compression_max_tokens", c.compression_max_tokens},
      {"max_concurrency", c.max_concurrency},
      {"rng_seed", c.rng_seed},
  };
}

TrainerConfig trainer_config_from_json(const nlohmann::json& j, TrainerConfig c) {
  auto read = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  read("epochs", c.epochs);
  read("batch_size", c.batch_size);
  read("validation_multiplier", c.validation_multiplier);
  read("wrong_sample_count", c.wrong_sample_count);
  read("candidate_count", c.candidate_count);
  read("improvement_threshold", c.improvement_threshold);
  read("recent_window", c.recent_window);
  read("stagnation_limit", c.stagnation_limit);
  read("compression_every_updates", c.compression_every_updates);
  read("compression_tolerance", c.compression_tolerance);
  read("compression_max_attempts", c.compression_max_attempts);
  read("gen_temperature", c.gen_temperature);
  read("compress_temperature", c.compress_temperature);
  read("inference_max_tokens", c.inference_max_tokens);
  read("compression_max_tokens", c.compression_max_tokens);
  read("max_concurrency", c.max_concurrency);
  read("rng_seed", c.rng_seed);
  return c;
}

nlohmann::json to_json(const HistoryRecord& r) {
  return {
      {"kind", r.kind == HistoryRecord::Kind::revision ? "revision" : "compression"},
      {"step", r.step},
      {"raw", r.raw},
      {"compressed", r.compressed},
      {"val_accuracy", r.val_accuracy},
      {"gate", r.gate},
  };
}

HistoryRecord history_record_from_json(const nlohmann::json& j) {
  HistoryRecord r;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "revision") {
    r.kind = HistoryRecord::Kind::revision;
  } else if (kind == "compression") {
    r.kind = HistoryRecord::Kind::compression;
  } else {
    throw LoadError("unknown history record kind '" + kind + "'");
  }
  r.step = j.at("step").get<int>();
  r.raw = j.at("raw").get<std::string>();
  r.compressed = j.at("compressed").get<std::string>();
  r.val_accuracy = j.at("val_accuracy").get<double>();
  r.gate = j.at("gate").get<double>();
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.per_sample) {
    nlohmann::json e{{"id", s.id}, {"extracted", s.extracted}, {"correct", s.correct},
                     {"output", s.output}};
    if (!s.program.empty()) e["program"] = s.program;
    samples.push_back(std::move(e));
  }
  nlohmann::json j{
      {"task", r.task},
      {"mode", to_string(r.mode)},
      {"backend_model", r.backend_model},
      {"program_source_model", nullptr},
      {"split", to_string(r.split)},
      {"accuracy", r.accuracy},
      {"n", r.n},
      {"program", r.program},
      {"usage", {{"prompt_tokens", r.prompt_tokens}, {"completion_tokens", r.completion_tokens}}},
      {"per_sample", std::move(samples)},
  };
  if (r.program_source_model) j["program_source_model"] = *r.program_source_model;
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.task = j.at("task").get<std::string>();
  r.mode = parse_eval_mode(j.at("mode").get<std::string>());
  r.backend_model = j.at("backend_model").get<std::string>();
  if (j.contains("program_source_model") && !j.at("program_source_model").is_null()) {
    r.program_source_model = j.at("program_source_model").get<std::string>();
  }
  r.split = parse_split_kind(j.at("split").get<std::string>());
  r.accuracy = j.at("accuracy").get<double>();
  r.n = j.at("n").get<int>();
  r.program = j.value("program", std::string{});
  if (j.contains("usage")) {
    r.prompt_tokens = j.at("usage").value("prompt_tokens", 0LL);
    r.completion_tokens = j.at("usage").value("completion_tokens", 0LL);
  }
  for (const auto& e : j.at("per_sample")) {
    SampleResult s;
    s.id = e.at("id").get<std::string>();
    s.extracted = e.at("extracted").get<std::string>();
    s.correct = e.at("correct").get<bool>();
    s.output = e.value("output", std::string{});
    s.program = e.value("program", std::string{});
    r.per_sample.push_back(std::move(s));
  }
  return r;
}

}  // namespace lp
