// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "lp/checkpoint.hpp"
#include "lp/error.hpp"
#include "lp/grading.hpp"
#include "lp/io.hpp"
#include "lp/log.hpp"
#include "lp/parallel.hpp"
#include "lp/rng.hpp"
#include "lp/text.hpp"

namespace lp {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSelfProgramSalt = 0x5e1f'9a0b'c0de'0004ULL;
constexpr const char* kSummaryJson = "summary.json";
constexpr const char* kSummaryMd = "summary.md";

struct Answered {
  SampleResult result;
  Usage usage;
};

CompletionResponse ask(Backend& backend, std::string prompt, double temperature, int max_tokens) {
  CompletionRequest request;
  request.user = std::move(prompt);
  request.temperature = temperature;
  request.max_tokens = max_tokens;
  auto response = backend.complete(request);
  if (response.truncated()) log::warn("completion hit max_tokens; grading the truncated text");
  return response;
}

Answered answer_one(const Task& task, const Sample& sample, const Program& program,
                    Backend& backend, const EvalOptions& options) {
  const auto prompt = render_guided_inference(task, program, sample, options.prompts);
  auto response = ask(backend, prompt, 0.0, options.max_tokens);
  const auto g = grade(response.text, sample.answer, task.answer_kind);
  Answered a;
  a.result.id = sample.id;
  a.result.extracted = g.extracted;
  a.result.correct = g.correct;
  a.result.output = std::move(response.text);
  a.usage = response.usage;
  return a;
}

EvalReport assemble(const Task& task, Backend& backend, const EvalOptions& options,
                    std::vector<Answered> answers, std::string program_text) {
  EvalReport report;
  report.task = task.name;
  report.mode = options.mode;
  report.backend_model = backend.model_name();
  report.program_source_model = options.program_source_model;
  report.split = options.split;
  report.program = std::move(program_text);
  report.n = static_cast<int>(answers.size());
  for (auto& a : answers) {
    report.prompt_tokens += a.usage.prompt_tokens;
    report.completion_tokens += a.usage.completion_tokens;
    report.per_sample.push_back(std::move(a.result));
  }
  report.accuracy = report.n == 0 ? 0.0 : report.recomputed_accuracy();
  return report;
}

std::string table_cell(double v) { return format_percent(v); }

std::string delta_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f", v);
  // -0.0 reads oddly in a table
  return std::string(buf) == "-0.0" ? "+0.0" : buf;
}

}  // namespace

EvalReport evaluate(const Task& task, std::span<const Sample> samples, const Program& program,
                    Backend& backend, const EvalOptions& options) {
  if (samples.empty()) throw InvalidArgument("evaluate: no samples to evaluate");
  auto answers = parallel_map(samples.size(), static_cast<std::size_t>(options.max_concurrency),
                              [&](std::size_t i) {
                                return answer_one(task, samples[i], program, backend, options);
                              });
  return assemble(task, backend, options, std::move(answers), program.rendered());
}

SelfProgramResult run_self_program(const Task& task, std::span<const Sample> test_samples,
                                   Backend& backend, bool few_shot,
                                   std::span<const Sample> train_samples, std::uint64_t seed,
                                   EvalOptions options) {
  if (test_samples.empty()) throw InvalidArgument("self-program: no test samples");
  options.mode = EvalMode::self_program;
  SelfProgramResult out;

  if (!few_shot) {
    auto answers = parallel_map(
        test_samples.size(), static_cast<std::size_t>(options.max_concurrency), [&](std::size_t i) {
          const auto& sample = test_samples[i];
          auto generated = ask(backend, render_self_program(sample, options.prompts), 0.0,
                               kSelfProgramMaxTokens);
          Program own;
          if (!text::trim(generated.text).empty()) own = append_revision(own, generated.text);
          auto a = answer_one(task, sample, own, backend, options);
          a.result.program = own.rendered();
          a.usage.prompt_tokens += generated.usage.prompt_tokens;
          a.usage.completion_tokens += generated.usage.completion_tokens;
          return a;
        });
    out.report = assemble(task, backend, options, std::move(answers), "");
    return out;
  }

  if (train_samples.size() < static_cast<std::size_t>(kSelfProgramShots)) {
    throw InvalidArgument("few-shot self-program needs at least " +
                          std::to_string(kSelfProgramShots) + " training samples, got " +
                          std::to_string(train_samples.size()));
  }
  Rng rng(seed ^ kSelfProgramSalt);
  Program joined;
  Usage setup;
  for (auto idx : rng.choose(train_samples.size(), kSelfProgramShots)) {
    auto generated = ask(backend, render_self_program(train_samples[idx], options.prompts), 0.0,
                         kSelfProgramMaxTokens);
    setup.prompt_tokens += generated.usage.prompt_tokens;
    setup.completion_tokens += generated.usage.completion_tokens;
    if (!text::trim(generated.text).empty()) joined = append_revision(joined, generated.text);
  }
  if (joined.empty()) throw BackendError("self-program: every generated program was empty");

  auto compressed = ask(backend, render_program_compression(joined, task.max_solutions, options.prompts),
                        0.6, 2048);
  setup.prompt_tokens += compressed.usage.prompt_tokens;
  setup.completion_tokens += compressed.usage.completion_tokens;
  if (text::trim(compressed.text).empty()) {
    log::warn("self-program compression came back empty; using the concatenated programs");
    out.program = joined;
  } else {
    out.program = replace_with_compressed(joined, compressed.text);
  }
  out.program.origin_model = backend.model_name();

  out.report = evaluate(task, test_samples, out.program, backend, options);
  out.report.prompt_tokens += setup.prompt_tokens;
  out.report.completion_tokens += setup.completion_tokens;
  return out;
}

LoadedProgram load_program_source(const fs::path& source) {
  LoadedProgram loaded;
  if (fs::is_directory(source)) {
    auto state = load_checkpoint(source);
    loaded.program = std::move(state.program);
    loaded.source_model = loaded.program.origin_model.empty() ? "unknown" : loaded.program.origin_model;
    return loaded;
  }
  if (!fs::exists(source)) throw LoadError("program source not found: " + source.string());
  const auto text = io::read_file(source);
  if (!text::trim(text).empty()) loaded.program = append_revision({}, text::trim(text));
  loaded.source_model = "unknown";
  return loaded;
}

EvalReport run_transfer(const fs::path& source, Backend& target, const Task& task,
                        std::span<const Sample> samples, EvalOptions options) {
  auto loaded = load_program_source(source);
  if (loaded.program.empty()) {
    throw InvalidArgument("transfer: the program at " + source.string() +
                          " is empty; train a program before transferring it");
  }
  options.mode = EvalMode::transfer;
  if (!options.program_source_model) options.program_source_model = loaded.source_model;
  log::info("transferring program from " + *options.program_source_model + " to " +
            target.model_name());
  return evaluate(task, samples, loaded.program, target, options);
}

std::string column_label(const EvalReport& report) {
  if (report.mode == EvalMode::transfer) {
    return "transfer (" + report.program_source_model.value_or("unknown") + " -> " +
           report.backend_model + ")";
  }
  return std::string(to_string(report.mode));
}

std::vector<RunComparison> compare(std::span<const EvalReport> reports) {
  std::vector<RunComparison> out;
  for (const auto& r : reports) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& c) { return c.task == r.task; });
    if (it == out.end()) {
      out.push_back({r.task, {}, {}});
      it = std::prev(out.end());
    }
    it->rows.push_back({column_label(r), r.mode, r.backend_model, r.accuracy, r.n});
  }
  for (auto& c : out) {
    for (const auto& row : c.rows) c.deltas.push_back(row.accuracy - c.rows.front().accuracy);
  }
  return out;
}

fs::path write_report(const EvalReport& report, const fs::path& run_dir) {
  const auto path = run_dir / kReportsDir / (report.task + "-" + std::string(to_string(report.mode)) + ".json");
  io::write_file_atomic(path, to_json(report).dump(2) + "\n");
  return path;
}

std::vector<EvalReport> load_reports(const fs::path& run_dir) {
  const auto dir = run_dir / kReportsDir;
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto& p = entry.path();
      if (p.extension() == ".json" && p.filename() != kSummaryJson) files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalReport> reports;
  for (const auto& f : files) {
    try {
      reports.push_back(eval_report_from_json(nlohmann::json::parse(io::read_file(f))));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("corrupt report " + f.string() + ": " + e.what());
    }
  }
  return reports;
}

std::string render_summary_table(std::span<const RunComparison> comparisons) {
  std::vector<std::string> columns;
  for (const auto& c : comparisons) {
    for (const auto& row : c.rows) {
      if (std::find(columns.begin(), columns.end(), row.label) == columns.end()) {
        columns.push_back(row.label);
      }
    }
  }

  // accuracy per (task, column); tasks lacking a column show "-" and are
  // left out of that column's average
  std::vector<std::map<std::string, double>> cells;
  for (const auto& c : comparisons) {
    std::map<std::string, double> m;
    for (const auto& row : c.rows) m.emplace(row.label, row.accuracy);
    cells.push_back(std::move(m));
  }

  const bool deltas = columns.size() >= 2;
  std::ostringstream out;
  out << "| Task |";
  for (const auto& col : columns) out << ' ' << col << " |";
  if (deltas) {
    for (std::size_t i = 1; i < columns.size(); ++i) out << " Δ " << columns[i] << " |";
  }
  out << "\n|---|";
  const auto width = columns.size() + (deltas ? columns.size() - 1 : 0);
  for (std::size_t i = 0; i < width; ++i) out << "---|";
  out << '\n';

  auto emit_row = [&](const std::string& name, const std::map<std::string, double>& row) {
    out << "| " << name << " |";
    for (const auto& col : columns) {
      auto it = row.find(col);
      out << ' ' << (it == row.end() ? "-" : table_cell(it->second)) << " |";
    }
    if (deltas) {
      auto first = row.find(columns.front());
      for (std::size_t i = 1; i < columns.size(); ++i) {
        auto it = row.find(columns[i]);
        out << ' '
            << (it == row.end() || first == row.end() ? "-" : delta_cell(it->second - first->second))
            << " |";
      }
    }
    out << '\n';
  };

  for (std::size_t i = 0; i < comparisons.size(); ++i) emit_row(comparisons[i].task, cells[i]);

  std::map<std::string, double> avg;
  for (const auto& col : columns) {
    double sum = 0.0;
    int count = 0;
    for (const auto& m : cells) {
      if (auto it = m.find(col); it != m.end()) {
        sum += it->second;
        ++count;
      }
    }
    if (count > 0) avg[col] = sum / count;
  }
  emit_row("Avg", avg);
  return out.str();
}

void emit_report(std::span<const RunComparison> comparisons, const fs::path& run_dir) {
  if (comparisons.empty()) throw InvalidArgument("emit_report: nothing to report");
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : comparisons) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) {
      rows.push_back({{"label", r.label},
                      {"mode", to_string(r.mode)},
                      {"model", r.model},
                      {"accuracy", r.accuracy},
                      {"n", r.n}});
    }
    j.push_back({{"task", c.task}, {"rows", rows}, {"deltas", c.deltas}});
  }
  const auto dir = run_dir / kReportsDir;
  io::write_file_atomic(dir / kSummaryJson, j.dump(2) + "\n");
  io::write_file_atomic(dir / kSummaryMd, render_summary_table(comparisons));
}

}  // namespace lp
