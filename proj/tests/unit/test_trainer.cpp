// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "lp/checkpoint.hpp"
#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/trainer.hpp"
#include "support.hpp"

namespace lp {
namespace {

using testing::rule;
using testing::Scenario;

std::vector<MockRule> concat(std::initializer_list<std::vector<MockRule>> parts) {
  std::vector<MockRule> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

RevisionCandidate verified(double acc) {
  RevisionCandidate c;
  c.compressed = "c" + std::to_string(acc);
  c.val_accuracy = acc;
  c.verified = true;
  return c;
}

TEST(Select, ArgmaxOverGatedSet) {
  TrainerConfig config;
  std::vector<RevisionCandidate> c;
  for (double a : {50.0, 62.0, 58.0, 51.0, 49.0}) c.push_back(verified(a));
  const std::vector<double> perfs{55.0};
  EXPECT_EQ(select_revision(c, perfs, config), 1u);
}

TEST(Select, BoundaryAndTies) {
  TrainerConfig config;
  const std::vector<double> perfs{54.0, 55.0, 56.0};  // mean 55
  std::vector<RevisionCandidate> edge{verified(55.9), verified(56.0)};
  EXPECT_EQ(select_revision(edge, perfs, config), 1u);
  std::vector<RevisionCandidate> below{verified(55.9), verified(50.0)};
  EXPECT_FALSE(select_revision(below, perfs, config));
  std::vector<RevisionCandidate> tie{verified(57.0), verified(60.0), verified(60.0)};
  EXPECT_EQ(select_revision(tie, perfs, config), 1u);
  auto unverified = verified(90.0);
  unverified.verified = false;
  std::vector<RevisionCandidate> skip{unverified, verified(57.0)};
  EXPECT_EQ(select_revision(skip, perfs, config), 1u);
}

TEST(RecentAverage, Window) {
  const std::vector<double> p{10, 20, 30, 40};
  EXPECT_DOUBLE_EQ(recent_average(p, 3), 30.0);
  EXPECT_DOUBLE_EQ(recent_average(std::vector<double>{48.0}, 3), 48.0);
}

TEST(Predict, WrongExamplesAndOrdering) {
  Scenario sc(8, 4, 0);
  // item 2 answered wrong, the rest answered with their own tag
  auto rules = concat({{rule("[item-2]", "The answer is 99.")}, testing::correct_with("Q:", 0, 4)});
  MockBackend backend{MockScript(rules)};
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  const auto batch = sc.dataset.select({"s0", "s1", "s2", "s3"});
  const auto out = predict_batch(batch, Program{}, env, 1);
  ASSERT_EQ(out.predictions.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(out.predictions[static_cast<std::size_t>(i)].sample.id, "s" + std::to_string(i));
  ASSERT_EQ(out.wrong.size(), 1u);
  EXPECT_EQ(out.wrong[0].sample.id, "s2");
  EXPECT_EQ(out.wrong[0].prediction, "The answer is 99.");
  EXPECT_DOUBLE_EQ(out.batch_accuracy, 75.0);
}

TEST(Predict, ExtractionFailureIsWrong) {
  Scenario sc(4, 4, 0);
  MockBackend backend(MockScript({testing::fallback("no idea")}));
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  const auto out = predict_batch(sc.dataset.select({"s0"}), Program{}, env);
  EXPECT_EQ(out.wrong.size(), 1u);
}

TEST(Candidate, ClampsAndConsumesInOrder) {
  Scenario sc(8, 4, 0);
  MockBackend backend(MockScript({rule("Wrong output:", "raw text"),
                                  rule("summarize the similar solutions in [raw text]", "short")}));
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  const auto samples = sc.dataset.select({"s0", "s1"});
  std::vector<WrongExample> wrong{{samples[0], "x", ""}, {samples[1], "y", ""}};
  Rng rng(1);
  const auto c = generate_candidate(wrong, Program{}, env, rng, 0);
  ASSERT_TRUE(c);
  EXPECT_EQ(c->raw, "raw text");
  EXPECT_EQ(c->compressed, "short");
  EXPECT_EQ(c->seed_errors.size(), 2u);
  const auto calls = backend.calls();
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_NE(calls[0].user.find("Wrong output:"), std::string::npos);
  EXPECT_DOUBLE_EQ(calls[1].temperature, 0.6);
}

TEST(Candidate, DifferentDrawsDifferentSubsets) {
  Scenario sc(12, 4, 0);
  MockBackend backend(MockScript({rule("Wrong output:", "r"), rule("summarize", "c")}));
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  std::vector<WrongExample> wrong;
  for (const auto& s : sc.dataset.select(sc.plan.train_ids)) wrong.push_back({s, "bad", ""});
  Rng rng(7);
  const auto a = generate_candidate(wrong, Program{}, env, rng, 0);
  const auto b = generate_candidate(wrong, Program{}, env, rng, 1);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->seed_errors.size(), 3u);
  EXPECT_NE(a->seed_errors, b->seed_errors);
}

TEST(Candidate, EmptyCompletionDiscarded) {
  Scenario sc(4, 4, 0);
  MockBackend backend(MockScript({rule("Wrong output:", "  "), rule("summarize", "c")}));
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  std::vector<WrongExample> wrong{{sc.dataset.select({"s0"})[0], "bad", ""}};
  Rng rng(1);
  EXPECT_FALSE(generate_candidate(wrong, Program{}, env, rng));
}

TEST(Verify, PseudoUpdateOnly) {
  Scenario sc(4, 100, 0);
  MockBackend backend(MockScript(concat({testing::correct_with("TOKEN", sc.first_validation(), 62),
                                         {testing::always_wrong()}})));
  const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
  const auto program = append_revision({}, "existing rule");
  const auto before = program;
  RevisionCandidate c;
  c.compressed = "TOKEN rule";
  const auto v = verify_candidate(c, program, sc.validation(), env);
  EXPECT_TRUE(v.verified);
  EXPECT_DOUBLE_EQ(v.val_accuracy, 62.0);
  EXPECT_EQ(program, before);

  RevisionCandidate empty;
  EXPECT_FALSE(verify_candidate(empty, program, sc.validation(), env).verified);
}

TEST(Update, AppendsAndArms) {
  TrainerConfig config;
  TrainState s;
  s.task = "t";
  s.recorded_perfs = {48.0};
  s.updates_since_compression = 2;
  s.stagnant_batches = 4;
  auto c = verified(56.0);
  c.raw = "raw";
  const auto next = update_program(s, c, config, {});
  EXPECT_EQ(next.program.blocks.size(), 1u);
  EXPECT_EQ(next.recorded_perfs, (std::vector<double>{48.0, 56.0}));
  EXPECT_EQ(next.updates_since_compression, 3);
  EXPECT_EQ(next.stagnant_batches, 0);
  ASSERT_EQ(next.history.size(), 1u);
  EXPECT_DOUBLE_EQ(next.history[0].gate, 49.0);
  EXPECT_TRUE(s.program.empty());
}

TEST(Compress, ToleranceAndExhaustion) {
  Scenario sc(4, 100, 0);
  const int v0 = sc.first_validation();
  TrainState s;
  s.task = "numbers";
  s.program = append_revision(append_revision(append_revision({}, "A-RULE"), "B-RULE"), "C-RULE");
  s.recorded_perfs = {0.0, 20.0, 40.0, 60.0};
  s.updates_since_compression = 3;

  {
    // attempt 1 drops 2.0, attempt 2 drops exactly 1.0
    MockBackend backend(MockScript(concat({{rule("summarize the similar solutions in [A-RULE", "SUMMARY-ONE", 1),
                                            rule("summarize the similar solutions in [A-RULE", "SUMMARY-TWO", 1)},
                                           testing::correct_with("SUMMARY-ONE", v0, 58),
                                           testing::correct_with("SUMMARY-TWO", v0, 59),
                                           {testing::always_wrong()}})));
    const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
    const auto next = compress_program(s, sc.validation(), env, {});
    EXPECT_EQ(next.program.blocks, std::vector<std::string>{"SUMMARY-TWO"});
    EXPECT_LT(next.program.rendered().size(), s.program.rendered().size());
    EXPECT_EQ(next.recorded_perfs.back(), 59.0);
    EXPECT_EQ(next.updates_since_compression, 0);
    ASSERT_EQ(next.history.size(), 1u);
    EXPECT_EQ(next.history[0].kind, HistoryRecord::Kind::compression);
  }
  {
    MockBackend backend(MockScript(concat({{rule("summarize the similar solutions in [A-RULE", "WEAK")},
                                           testing::correct_with("WEAK", v0, 50),
                                           {testing::always_wrong()}})));
    const TrainEnv env{sc.task, sc.config, backend, PromptBundle::defaults()};
    const auto next = compress_program(s, sc.validation(), env, {});
    EXPECT_EQ(next.program, s.program);
    EXPECT_EQ(next.recorded_perfs, s.recorded_perfs);
    EXPECT_EQ(next.updates_since_compression, 0);
    EXPECT_TRUE(next.history.empty());
    int attempts = 0;
    for (const auto& call : backend.calls()) attempts += call.user.find("[A-RULE") != std::string::npos;
    EXPECT_EQ(attempts, 3);
  }
}

TEST(Stop, Rules) {
  TrainerConfig config;
  TrainState s;
  s.stagnant_batches = 9;
  EXPECT_FALSE(should_stop(s, config).stop);
  s.stagnant_batches = 10;
  EXPECT_EQ(should_stop(s, config).reason, StopReason::stagnation);
  s.stagnant_batches = 0;
  s.epoch = 10;
  EXPECT_EQ(should_stop(s, config).reason, StopReason::epochs_exhausted);
}

TEST(Train, UselessRevisionsStopOnStagnation) {
  testing::TempDir dir;
  Scenario sc(40, 8, 4);
  MockBackend backend(MockScript({rule("Wrong output:", "not helpful"), rule("summarize", "still not helpful"),
                                  testing::always_wrong()}));
  const auto state = train(sc.task, sc.dataset, sc.plan, sc.config, backend, dir.path());
  EXPECT_EQ(state.stop_reason, StopReason::stagnation);
  EXPECT_EQ(state.step, 10);
  EXPECT_TRUE(state.program.empty());
  EXPECT_EQ(state.recorded_perfs, std::vector<double>{0.0});
  EXPECT_EQ(io::read_file(dir / kProgramFile), "");
}

TEST(Train, CandidateCallAccounting) {
  testing::TempDir dir;
  Scenario sc(40, 8, 4);
  MockBackend backend(MockScript({rule("Wrong output:", "nope"), rule("summarize", "nope"), testing::always_wrong()}));
  TrainOptions options;
  options.max_batches = 1;
  const auto state = train(sc.task, sc.dataset, sc.plan, sc.config, backend, dir.path(), options);
  EXPECT_EQ(state.stop_reason, StopReason::manual);
  // baseline sweep + batch + K*(revision+compression) + K validation sweeps
  const std::size_t v = sc.plan.validation_ids.size();
  EXPECT_EQ(backend.call_count(), v + 4 + 5 * 2 + 5 * v);
}

TEST(Train, AbortIsResumable) {
  testing::TempDir dir;
  Scenario sc(40, 8, 4);
  // the script runs dry mid-training: unmatched prompt aborts the batch
  MockBackend backend(MockScript({rule("Wrong output:", "nope"), rule("summarize", "nope"),
                                  [] {
                                    auto r = testing::always_wrong();
                                    r.max_uses = 8 + 4 + 5 * 8 + 4;
                                    return r;
                                  }()}));
  try {
    train(sc.task, sc.dataset, sc.plan, sc.config, backend, dir.path());
    FAIL();
  } catch (const TrainingAborted& e) {
    EXPECT_NE(std::string(e.what()).find("--resume"), std::string::npos);
  }
  const auto saved = load_checkpoint(dir.path());
  EXPECT_EQ(saved.step, 1);
  EXPECT_FALSE(saved.stopped);
}

TEST(Train, ResumeMatchesUninterrupted) {
  Scenario sc(40, 8, 4);
  const int v0 = sc.first_validation();
  auto script = [&] {
    return MockScript(concat({{rule("Wrong output:", "raw-A", 2), rule("Wrong output:", "raw-B", 3),
                               rule("Wrong output:", "raw-C", 3), rule("Wrong output:", "raw-none")},
                              {rule("[raw-A]", "RULE-A"), rule("[raw-B]", "RULE-B"), rule("[raw-C]", "RULE-C"),
                               rule("summarize", "none")},
                              testing::correct_with("RULE-C", v0, 6), testing::correct_with("RULE-B", v0, 4),
                              testing::correct_with("RULE-A", v0, 2), {testing::always_wrong()}}));
  };
  sc.config.candidate_count = 2;

  testing::TempDir straight;
  MockBackend b1(script());
  const auto full = train(sc.task, sc.dataset, sc.plan, sc.config, b1, straight.path());

  testing::TempDir paused;
  TrainOptions first;
  first.max_batches = 3;
  MockBackend b2(script());
  const auto mid = train(sc.task, sc.dataset, sc.plan, sc.config, b2, paused.path(), first);
  EXPECT_EQ(mid.step, 3);
  // a fresh backend would replay max_uses from scratch, so resume with the same one
  TrainOptions second;
  second.resume = true;
  const auto resumed = train(sc.task, sc.dataset, sc.plan, sc.config, b2, paused.path(), second);

  EXPECT_EQ(resumed.program, full.program);
  EXPECT_EQ(resumed.recorded_perfs, full.recorded_perfs);
  EXPECT_EQ(resumed.history, full.history);
  EXPECT_EQ(resumed.step, full.step);
  EXPECT_EQ(io::read_file(paused / kHistoryFile), io::read_file(straight / kHistoryFile));
  EXPECT_GE(full.history.size(), 2u);
}

TEST(Train, RejectsForeignCheckpoint) {
  testing::TempDir dir;
  Scenario sc(40, 8, 4);
  TrainState other;
  other.task = "other-task";
  other.recorded_perfs = {0.0};
  save_checkpoint(other, dir.path());
  MockBackend backend(MockScript({testing::always_wrong()}));
  TrainOptions options;
  options.resume = true;
  EXPECT_THROW(train(sc.task, sc.dataset, sc.plan, sc.config, backend, dir.path(), options), LoadError);
}

}  // namespace
}  // namespace lp
