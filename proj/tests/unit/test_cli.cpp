// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "lp/evaluation.hpp"
#include "lp/io.hpp"
#include "support.hpp"

namespace lp {
namespace {

namespace fs = std::filesystem;

const fs::path kLlc = fs::path(LP_FIXTURES) / "llc";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result lp(std::vector<std::string> args) {
  args.insert(args.begin(), "lp");
  args.insert(args.begin() + 1, "-q");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> train_args(const fs::path& out) {
  return {"train", "--task", (kLlc / "llc.toml").string(), "--backend", "mock", "--script",
          (kLlc / "teachable.mock.json").string(), "--out", out.string()};
}

TEST(Cli, TrainTeachableMock) {
  testing::TempDir dir;
  const auto r = lp(train_args(dir / "t1"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(io::read_file(dir / "t1/program.txt").empty());
  EXPECT_NE(r.out.find("test accuracy: baseline 0.0% -> lp 100.0%"), std::string::npos) << r.out;
  const auto config = nlohmann::json::parse(io::read_file(dir / "t1/config.json"));
  EXPECT_EQ(config.at("trainer").at("batch_size"), 8);
  EXPECT_EQ(config.at("trainer").at("rng_seed"), 7);
  EXPECT_EQ(config.at("backend"), "mock");
  EXPECT_TRUE(fs::exists(dir / "t1/reports/summary.md"));
  // refuses to clobber an existing run
  EXPECT_EQ(lp(train_args(dir / "t1")).code, 2);
}

TEST(Cli, MissingDatasetIsUsageError) {
  testing::TempDir dir;
  std::ofstream(dir / "bad.toml") << "name = \"x\"\nanswer_kind = \"numeric\"\ndata = \"absent.jsonl\"\n";
  const auto r = lp({"train", "--task", (dir / "bad.toml").string(), "--script",
                     (kLlc / "teachable.mock.json").string(), "--out", (dir / "r").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("absent.jsonl"), std::string::npos) << r.err;
}

TEST(Cli, ResumeContinues) {
  testing::TempDir dir;
  auto args = train_args(dir / "paused");
  args.insert(args.end(), {"--max-batches", "2"});
  const auto first = lp(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("--resume"), std::string::npos);
  const auto second = lp({"train", "--resume", (dir / "paused").string()});
  ASSERT_EQ(second.code, 0) << second.err;
  ASSERT_EQ(lp(train_args(dir / "straight")).code, 0);
  EXPECT_EQ(io::read_file(dir / "paused/program.txt"), io::read_file(dir / "straight/program.txt"));
  EXPECT_EQ(io::read_file(dir / "paused/history.jsonl"), io::read_file(dir / "straight/history.jsonl"));
}

TEST(Cli, DataSplitRatio) {
  testing::TempDir dir;
  const auto r = lp({"data", "split", "--in", (kLlc / "llc.jsonl").string(), "--ratio", "3:1", "--seed", "7",
                     "--out-dir", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto lines = [](const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string l; std::getline(in, l);) n += !l.empty();
    return n;
  };
  EXPECT_EQ(lines(dir / "llc.train.jsonl"), 150);
  EXPECT_EQ(lines(dir / "llc.test.jsonl"), 50);
  EXPECT_EQ(lp({"data", "check", "--in", (dir / "llc.test.jsonl").string(), "--kind", "letter_concat"}).code, 0);
}

TEST(Cli, TransferRecordsModels) {
  testing::TempDir dir;
  ASSERT_EQ(lp(train_args(dir / "t1")).code, 0);
  const auto r = lp({"transfer", "--program", (dir / "t1").string(), "--model", "other-model"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = eval_report_from_json(
      nlohmann::json::parse(io::read_file(dir / "t1/reports/last_letter_concat-transfer.json")));
  EXPECT_EQ(report.program_source_model, "mock");
  EXPECT_EQ(report.backend_model, "other-model");
}

TEST(Cli, ReportOnEmptyRun) {
  testing::TempDir dir;
  const auto r = lp({"report", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no reports"), std::string::npos);
}

TEST(Cli, DryRunMakesNoCalls) {
  testing::TempDir dir;
  std::ofstream(dir / "empty.json") << "[]";
  const auto r = lp({"train", "--task", (kLlc / "llc.toml").string(), "--script", (dir / "empty.json").string(),
                     "--out", (dir / "r").string(), "--dry-run"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto* phase : {"guided inference", "self-program", "revision", "revision compression",
                            "program compression"}) {
    EXPECT_NE(r.out.find(std::string("=== ") + phase + " ==="), std::string::npos) << phase;
  }
  EXPECT_FALSE(fs::exists(dir / "r/state.json"));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(lp({"train", "--bogus"}).code, 2);
  EXPECT_EQ(lp({"train", "--api-key", "sk-123"}).code, 2);
  EXPECT_EQ(lp({}).code, 2);
  testing::TempDir dir;
  auto args = train_args(dir / "r");
  args.insert(args.end(), {"--set", "no_such_knob=3"});
  EXPECT_EQ(lp(args).code, 2);
}

}  // namespace
}  // namespace lp
