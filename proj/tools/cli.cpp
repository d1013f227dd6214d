// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lp/cache.hpp"
#include "lp/checkpoint.hpp"
#include "lp/config_file.hpp"
#include "lp/data.hpp"
#include "lp/error.hpp"
#include "lp/evaluation.hpp"
#include "lp/http_backend.hpp"
#include "lp/io.hpp"
#include "lp/log.hpp"
#include "lp/mock_backend.hpp"
#include "lp/trainer.hpp"

namespace lp::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRunConfigFile = "config.json";

/// Bad invocation: wrong flags, missing files. Maps to exit 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CommonArgs {
  std::string task;
  std::string backend;  // mock | live, empty: from run config or mock
  std::string script;
  std::string model;
  std::string cache;
  std::string prompts;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  int max_concurrency = 0;
};

/// Everything a command needs, fully materialized.
struct RunSetup {
  fs::path task_config;
  TaskConfig task;
  TrainerConfig trainer;
  std::string backend_kind = "mock";
  std::string model;
  fs::path script;
  fs::path cache;
  fs::path prompts_dir;
  Dataset dataset;
  std::optional<std::size_t> official_train_count;
  SplitPlan plan;
  PromptBundle prompts = PromptBundle::defaults();
};

fs::path absolute_or_empty(const std::string& p) {
  return p.empty() ? fs::path{} : fs::absolute(p).lexically_normal();
}

void require_file(const fs::path& path, std::string_view what) {
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path.string());
}

std::optional<nlohmann::json> read_run_config(const fs::path& run_dir) {
  if (run_dir.empty()) return std::nullopt;
  const auto path = run_dir / kRunConfigFile;
  if (!fs::exists(path)) return std::nullopt;
  try {
    return nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt " + path.string() + ": " + e.what());
  }
}

void apply_sets(TrainerConfig& config, const std::vector<std::string>& sets) {
  const auto known = to_json(TrainerConfig{});
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
    const auto key = s.substr(0, eq);
    if (!known.contains(key)) throw UsageError("unknown trainer setting '" + key + "'");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(s.substr(eq + 1));
    } catch (const nlohmann::json::exception&) {
      value = s.substr(eq + 1);
    }
    try {
      config = trainer_config_from_json({{key, value}}, config);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("bad value for '" + key + "': " + e.what());
    }
  }
}

RunSetup resolve(const CommonArgs& args, const fs::path& defaults_dir) {
  const auto stored = read_run_config(defaults_dir);
  RunSetup setup;

  auto pick = [&](const std::string& flag, const char* key) -> std::string {
    if (!flag.empty()) return flag;
    if (stored && stored->contains(key) && (*stored)[key].is_string()) return (*stored)[key].get<std::string>();
    return {};
  };

  const auto task_path = pick(args.task, "task_config");
  if (task_path.empty()) throw UsageError("--task is required");
  setup.task_config = absolute_or_empty(task_path);
  require_file(setup.task_config, "task config");
  setup.task = load_task_config(setup.task_config);

  setup.backend_kind = pick(args.backend, "backend");
  if (setup.backend_kind.empty()) setup.backend_kind = "mock";
  if (setup.backend_kind != "mock" && setup.backend_kind != "live") {
    throw UsageError("--backend must be mock or live, got '" + setup.backend_kind + "'");
  }
  setup.model = pick(args.model, "model");
  setup.script = absolute_or_empty(pick(args.script, "script"));
  setup.cache = absolute_or_empty(pick(args.cache, "cache"));
  setup.prompts_dir = absolute_or_empty(pick(args.prompts, "prompts"));
  if (setup.model.empty()) setup.model = setup.backend_kind == "mock" ? "mock" : "gpt-3.5-turbo";
  if (setup.backend_kind == "mock") {
    if (setup.script.empty()) throw UsageError("--script is required with --backend mock");
    require_file(setup.script, "mock script");
  }
  if (!setup.prompts_dir.empty()) setup.prompts = PromptBundle::with_overrides(setup.prompts_dir);

  if (stored && stored->contains("trainer")) {
    setup.trainer = trainer_config_from_json(stored->at("trainer"));
  } else {
    setup.trainer.rng_seed = setup.task.seed;
    setup.trainer = trainer_config_from_json(setup.task.trainer, setup.trainer);
  }
  apply_sets(setup.trainer, args.sets);
  if (args.seed) setup.trainer.rng_seed = *args.seed;
  if (args.max_concurrency > 0) setup.trainer.max_concurrency = args.max_concurrency;
  setup.trainer.validate();

  const auto& t = setup.task;
  if (t.data) {
    require_file(*t.data, "dataset file");
    setup.dataset = load_dataset(*t.data, t.task);
  } else if (t.train && t.test) {
    require_file(*t.train, "dataset file");
    require_file(*t.test, "dataset file");
    std::size_t count = 0;
    setup.dataset = load_dataset_pair(*t.train, *t.test, t.task, &count);
    setup.official_train_count = count;
  } else {
    throw UsageError(setup.task_config.string() + ": no 'data' or 'train'/'test' dataset given");
  }
  setup.plan = plan_run_split(setup.dataset, setup.trainer, setup.official_train_count);
  return setup;
}

std::shared_ptr<Backend> make_backend(const RunSetup& setup, const std::string& model) {
  std::shared_ptr<Backend> backend;
  if (setup.backend_kind == "mock") {
    backend = std::make_shared<MockBackend>(MockScript::from_file(setup.script), model);
  } else {
    backend = std::make_shared<HttpBackend>(HttpBackendConfig::from_env(model));
  }
  if (!setup.cache.empty()) {
    backend = std::make_shared<CachingBackend>(std::move(backend), ResponseCache(setup.cache));
  }
  return backend;
}

nlohmann::json run_config_json(const RunSetup& s, const fs::path& run_dir) {
  nlohmann::json data = nlohmann::json::object();
  if (s.task.data) data["data"] = s.task.data->string();
  if (s.task.train) data["train"] = s.task.train->string();
  if (s.task.test) data["test"] = s.task.test->string();
  data["sha256"] = s.dataset.content_digest;
  data["samples"] = s.dataset.samples.size();
  auto opt = [](const fs::path& p) { return p.empty() ? nlohmann::json(nullptr) : nlohmann::json(p.string()); };
  return {
      {"task_config", s.task_config.string()},
      {"task",
       {{"name", s.task.task.name},
        {"answer_kind", to_string(s.task.task.answer_kind)},
        {"prompt_mode", to_string(s.task.task.prompt_mode)},
        {"max_solutions", s.task.task.max_solutions},
        {"split_ratio", std::to_string(s.task.task.split_ratio.train) + ":" +
                            std::to_string(s.task.task.split_ratio.test)},
        {"demos", s.task.task.demos.size()}}},
      {"dataset", data},
      {"split",
       {{"train", s.plan.train_ids.size()},
        {"validation", s.plan.validation_ids.size()},
        {"test", s.plan.test_ids.size()}}},
      {"backend", s.backend_kind},
      {"model", s.model},
      {"script", opt(s.script)},
      {"cache", opt(s.cache)},
      {"prompts", opt(s.prompts_dir)},
      {"trainer", to_json(s.trainer)},
      {"run_dir", fs::absolute(run_dir).lexically_normal().string()},
  };
}

void write_run_config(const RunSetup& s, const fs::path& run_dir) {
  io::write_file_atomic(run_dir / kRunConfigFile, run_config_json(s, run_dir).dump(2) + "\n");
}

void print_dry_run(const RunSetup& s, std::ostream& out) {
  const auto& task = s.task.task;
  const auto train = s.dataset.select(s.plan.train_ids);
  const auto& first = train.front();
  Program placeholder;
  placeholder = append_revision(placeholder, "<program>");
  auto section = [&out](std::string_view name, const std::string& body) {
    out << "=== " << name << " ===\n" << body << "\n\n";
  };
  section("guided inference", render_guided_inference(task, Program{}, first, s.prompts));
  section("self-program", render_self_program(first, s.prompts));
  std::vector<WrongExample> wrong{{first, "<model output>", ""}};
  section("revision", render_revision(wrong, Program{}, s.prompts));
  section("revision compression", render_revision_compression("<revision>", task.max_solutions, s.prompts));
  section("program compression", render_program_compression(placeholder, task.max_solutions, s.prompts));
  out << "dry run: no backend calls were made\n";
}

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--task", a.task, "task config (.toml or .json)");
  cmd->add_option("--backend", a.backend, "mock or live")->check(CLI::IsMember({"mock", "live"}));
  cmd->add_option("--script", a.script, "mock script (JSON array or JSONL)");
  cmd->add_option("--model", a.model, "model name");
  cmd->add_option("--cache", a.cache, "response cache directory");
  cmd->add_option("--prompts", a.prompts, "directory of prompt template overrides");
  cmd->add_option("--set", a.sets, "trainer override key=value (repeatable)");
  cmd->add_option("--seed", a.seed, "run seed");
  cmd->add_option("--max-concurrency", a.max_concurrency, "parallel requests");
}

std::string summary_line(const EvalReport& r) {
  return r.task + " " + std::string(to_string(r.mode)) + " [" + r.backend_model + "] on " +
         std::string(to_string(r.split)) + ": " + format_percent(r.accuracy) + "% (n=" +
         std::to_string(r.n) + ")";
}

EvalOptions eval_options(const RunSetup& s, EvalMode mode, SplitKind split) {
  EvalOptions o;
  o.mode = mode;
  o.split = split;
  o.max_concurrency = s.trainer.max_concurrency;
  o.max_tokens = s.trainer.inference_max_tokens;
  o.prompts = s.prompts;
  return o;
}

std::vector<Sample> split_samples(const RunSetup& s, SplitKind split) {
  switch (split) {
    case SplitKind::train: return s.dataset.select(s.plan.train_ids);
    case SplitKind::validation: return s.dataset.select(s.plan.validation_ids);
    case SplitKind::test: break;
  }
  return s.dataset.select(s.plan.test_ids);
}

void refresh_summary(const fs::path& run_dir) {
  const auto reports = load_reports(run_dir);
  if (!reports.empty()) emit_report(compare(reports), run_dir);
}

struct TrainArgs {
  CommonArgs common;
  std::string out;
  std::string resume;
  std::optional<int> max_batches;
  bool dry_run = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  if (a.out.empty() == a.resume.empty()) throw UsageError("give exactly one of --out or --resume");
  const fs::path run_dir = a.resume.empty() ? fs::path(a.out) : fs::path(a.resume);
  if (!a.resume.empty() && !fs::exists(run_dir / kStateFile)) {
    throw UsageError("no checkpoint to resume in " + run_dir.string());
  }
  const auto setup = resolve(a.common, a.resume.empty() ? fs::path{} : run_dir);
  if (a.dry_run) {
    print_dry_run(setup, out);
    return kExitOk;
  }
  if (a.resume.empty() && fs::exists(run_dir / kStateFile)) {
    throw UsageError(run_dir.string() + " already holds a run; use --resume or a fresh --out");
  }

  fs::create_directories(run_dir);
  write_run_config(setup, run_dir);
  auto backend = make_backend(setup, setup.model);

  TrainOptions options;
  options.resume = !a.resume.empty();
  options.max_batches = a.max_batches;
  options.on_batch = [](const BatchOutcome& o, const TrainState& s) {
    log::debug("step " + std::to_string(s.step) + ": " + std::to_string(o.wrong.size()) + "/" +
               std::to_string(o.predictions.size()) + " wrong, stagnant " +
               std::to_string(s.stagnant_batches));
  };
  const auto state = train(setup.task.task, setup.dataset, setup.plan, setup.trainer, *backend,
                           run_dir, options, setup.prompts);

  out << "run directory: " << run_dir.string() << "\n";
  if (state.stop_reason == StopReason::manual) {
    out << "paused after step " << state.step << "; continue with: lp train --resume "
        << run_dir.string() << "\n";
    return kExitOk;
  }

  const auto test = split_samples(setup, SplitKind::test);
  const auto baseline = evaluate(setup.task.task, test, Program{}, *backend,
                                 eval_options(setup, EvalMode::baseline, SplitKind::test));
  const auto learned = evaluate(setup.task.task, test, state.program, *backend,
                                eval_options(setup, EvalMode::lp, SplitKind::test));
  write_report(baseline, run_dir);
  write_report(learned, run_dir);
  refresh_summary(run_dir);

  out << "stopped: " << to_string(state.stop_reason) << " after " << state.step << " batches, "
      << state.program.history_len << " accepted revisions\n";
  out << "validation accuracy: " << format_percent(state.recorded_perfs.back()) << "%\n";
  out << "test accuracy: baseline " << format_percent(baseline.accuracy) << "% -> lp "
      << format_percent(learned.accuracy) << "%\n";
  return kExitOk;
}

struct EvalArgs {
  CommonArgs common;
  std::string out;
  std::string program;
  std::string mode = "baseline";
  std::string split = "test";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const fs::path run_dir = a.out;
  const auto setup = resolve(a.common, run_dir);
  const auto mode = parse_eval_mode(a.mode);
  if (mode != EvalMode::baseline && mode != EvalMode::lp) {
    throw UsageError("lp eval supports --mode baseline or lp; see self-program and transfer");
  }
  Program program;
  if (mode == EvalMode::lp) {
    const fs::path source = a.program.empty() ? run_dir : fs::path(a.program);
    program = load_program_source(source).program;
    if (program.empty()) throw InvalidArgument("program at " + source.string() + " is empty");
  }
  const auto split = parse_split_kind(a.split);
  auto backend = make_backend(setup, setup.model);
  const auto samples = split_samples(setup, split);
  const auto report = evaluate(setup.task.task, samples, program, *backend, eval_options(setup, mode, split));
  const auto path = write_report(report, run_dir);
  refresh_summary(run_dir);
  out << summary_line(report) << " -> " << path.string() << "\n";
  return kExitOk;
}

struct SelfProgramArgs {
  CommonArgs common;
  std::string out;
  bool few_shot = false;
};

int cmd_self_program(const SelfProgramArgs& a, std::ostream& out) {
  const fs::path run_dir = a.out;
  const auto setup = resolve(a.common, run_dir);
  auto backend = make_backend(setup, setup.model);
  const auto test = split_samples(setup, SplitKind::test);
  const auto train_pool = split_samples(setup, SplitKind::train);
  const auto result = run_self_program(setup.task.task, test, *backend, a.few_shot, train_pool,
                                       setup.trainer.rng_seed,
                                       eval_options(setup, EvalMode::self_program, SplitKind::test));
  const auto path = write_report(result.report, run_dir);
  refresh_summary(run_dir);
  out << summary_line(result.report) << " -> " << path.string() << "\n";
  return kExitOk;
}

struct TransferArgs {
  CommonArgs common;
  std::string program;
  std::string out;
  std::string split = "test";
};

int cmd_transfer(const TransferArgs& a, std::ostream& out) {
  const fs::path source = a.program;
  if (!fs::exists(source)) throw UsageError("program source not found: " + source.string());
  const bool from_run = fs::is_directory(source);
  fs::path run_dir = a.out.empty() ? fs::path{} : fs::path(a.out);
  if (run_dir.empty()) {
    if (!from_run) throw UsageError("--out is required when --program is a file");
    run_dir = source;
  }
  const auto setup = resolve(a.common, from_run ? source : run_dir);
  const auto split = parse_split_kind(a.split);
  auto target = make_backend(setup, setup.model);
  const auto samples = split_samples(setup, split);
  const auto report = run_transfer(source, *target, setup.task.task, samples,
                                   eval_options(setup, EvalMode::transfer, split));
  const auto path = write_report(report, run_dir);
  refresh_summary(run_dir);
  out << summary_line(report) << ", program from " << report.program_source_model.value_or("unknown")
      << " -> " << path.string() << "\n";
  return kExitOk;
}

int cmd_report(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(run_dir)) throw UsageError("run directory not found: " + run_dir);
  const auto reports = load_reports(run_dir);
  if (reports.empty()) {
    err << "no reports in " << (fs::path(run_dir) / kReportsDir).string() << "\n";
    return kExitFailure;
  }
  const auto comparisons = compare(reports);
  emit_report(comparisons, run_dir);
  out << render_summary_table(comparisons);
  return kExitOk;
}

struct DataArgs {
  std::string in;
  std::string ratio = "3:1";
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string kind = "free_text";
};

int cmd_data_split(const DataArgs& a, std::ostream& out) {
  const fs::path in = a.in;
  require_file(in, "dataset file");
  Task task;
  task.name = in.stem().string();
  task.answer_kind = parse_answer_kind(a.kind);
  task.split_ratio = parse_split_ratio(a.ratio);
  const auto dataset = load_dataset(in, task);
  const auto plan = split_dataset(dataset, task.split_ratio, a.seed);
  const fs::path dir = a.out_dir.empty() ? in.parent_path() : fs::path(a.out_dir);
  fs::create_directories(dir.empty() ? fs::path(".") : dir);
  const auto train_path = dir / (in.stem().string() + ".train.jsonl");
  const auto test_path = dir / (in.stem().string() + ".test.jsonl");
  write_samples(train_path, dataset.select(plan.train_ids));
  write_samples(test_path, dataset.select(plan.test_ids));
  out << "train " << plan.train_ids.size() << " -> " << train_path.string() << ", test "
      << plan.test_ids.size() << " -> " << test_path.string() << "\n";
  return kExitOk;
}

int cmd_data_check(const DataArgs& a, std::ostream& out) {
  const fs::path in = a.in;
  require_file(in, "dataset file");
  Task task;
  task.name = in.stem().string();
  task.answer_kind = parse_answer_kind(a.kind);
  const auto dataset = load_dataset(in, task);
  out << "ok: " << dataset.samples.size() << " samples, labels grade as " << a.kind << ", sha256 "
      << dataset.content_digest << "\n";
  return kExitOk;
}

int cmd_cache_stats(const std::string& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw UsageError("cache directory not found: " + dir);
  const auto stats = ResponseCache(dir).stats();
  out << "entries " << stats.entries << ", bytes " << stats.bytes << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn natural-language programs against a chat-completion backend", "lp"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "run the learning loop");
  add_common(train_cmd, train_args.common);
  train_cmd->add_option("--out", train_args.out, "new run directory");
  train_cmd->add_option("--resume", train_args.resume, "continue the run in this directory");
  train_cmd->add_option("--max-batches", train_args.max_batches, "pause after this many batches");
  train_cmd->add_flag("--dry-run", train_args.dry_run, "print the first prompt of each phase and exit");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "guided inference over a split");
  add_common(eval_cmd, eval_args.common);
  eval_cmd->add_option("--out", eval_args.out, "run directory for the report")->required();
  eval_cmd->add_option("--program", eval_args.program, "run directory or program text file");
  eval_cmd->add_option("--mode", eval_args.mode, "baseline or lp");
  eval_cmd->add_option("--split", eval_args.split, "train, validation or test");

  SelfProgramArgs sp_args;
  auto* sp_cmd = app.add_subcommand("self-program", "self-program baseline");
  add_common(sp_cmd, sp_args.common);
  sp_cmd->add_option("--out", sp_args.out, "run directory for the report")->required();
  sp_cmd->add_flag("--few-shot", sp_args.few_shot, "compress programs from 4 training samples");

  TransferArgs tr_args;
  auto* tr_cmd = app.add_subcommand("transfer", "evaluate a learned program on another model");
  add_common(tr_cmd, tr_args.common);
  tr_cmd->add_option("--program", tr_args.program, "run directory or program text file")->required();
  tr_cmd->add_option("--out", tr_args.out, "run directory for the report (default: --program)");
  tr_cmd->add_option("--split", tr_args.split, "train, validation or test");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "rebuild the summary table of a run");
  report_cmd->add_option("run_dir", report_dir, "run directory")->required();

  DataArgs data_args;
  auto* data_cmd = app.add_subcommand("data", "dataset utilities");
  data_cmd->require_subcommand(1);
  auto* split_cmd = data_cmd->add_subcommand("split", "write train/test files by ratio");
  split_cmd->add_option("--in", data_args.in, "JSONL dataset")->required();
  split_cmd->add_option("--ratio", data_args.ratio, "train:test, e.g. 3:1");
  split_cmd->add_option("--seed", data_args.seed, "shuffle seed");
  split_cmd->add_option("--out-dir", data_args.out_dir, "output directory (default: next to --in)");
  split_cmd->add_option("--kind", data_args.kind, "answer kind used to check labels");
  auto* check_cmd = data_cmd->add_subcommand("check", "load a dataset and self-grade its labels");
  check_cmd->add_option("--in", data_args.in, "JSONL dataset")->required();
  check_cmd->add_option("--kind", data_args.kind, "answer kind");

  std::string cache_dir;
  auto* cache_cmd = app.add_subcommand("cache", "response cache utilities");
  cache_cmd->require_subcommand(1);
  auto* stats_cmd = cache_cmd->add_subcommand("stats", "entry count and size");
  stats_cmd->add_option("--cache", cache_dir, "cache directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  log::set_level(verbose ? log::Level::debug : quiet ? log::Level::warn : log::Level::info);

  try {
    if (train_cmd->parsed()) return cmd_train(train_args, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_args, out);
    if (sp_cmd->parsed()) return cmd_self_program(sp_args, out);
    if (tr_cmd->parsed()) return cmd_transfer(tr_args, out);
    if (report_cmd->parsed()) return cmd_report(report_dir, out, err);
    if (split_cmd->parsed()) return cmd_data_split(data_args, out);
    if (check_cmd->parsed()) return cmd_data_check(data_args, out);
    if (stats_cmd->parsed()) return cmd_cache_stats(cache_dir, out);
  } catch (const UsageError& e) {
    err << "lp: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "lp: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "lp: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "lp: " << e.what() << "\n";
    return kExitFailure;
  }
  err << "lp: no command given\n";
  return kExitUsage;
}

}  // namespace lp::cli
