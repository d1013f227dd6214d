// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "lp/error.hpp"
#include "lp/grading.hpp"
#include "support.hpp"

namespace lp {
namespace {

// Largest common divisor by trial division, no Euclid.
long long brute_gcd(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  if (a == 0) return b;
  for (long long g = std::min(a, b); g > 1; --g) {
    if (a % g == 0 && b % g == 0) return g;
  }
  return 1;
}

std::string oracle_fraction(long long n, long long d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const auto g = brute_gcd(n, d);
  n /= g;
  d /= g;
  if (d == 1) return std::to_string(n);
  return std::to_string(n) + "/" + std::to_string(d);
}

TEST(Fraction, MatchesBruteForceGcdOracle) {
  int mismatches = 0;
  for (long long n = -200; n <= 200; ++n) {
    for (long long d = -200; d <= 200; ++d) {
      if (d == 0) continue;
      const auto text = std::to_string(n) + "/" + std::to_string(d);
      const auto got = normalize_answer(text, AnswerKind::fraction);
      if (!got || *got != oracle_fraction(n, d)) {
        if (++mismatches < 5) ADD_FAILURE() << text << " -> " << got.value_or("<none>");
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(Fraction, LatexForms) {
  EXPECT_EQ(normalize_answer("\\frac{12}{13}", AnswerKind::fraction), "12/13");
  EXPECT_EQ(normalize_answer("$\\dfrac{6}{63}$", AnswerKind::fraction), "2/21");
  EXPECT_EQ(normalize_answer("6/63", AnswerKind::fraction), "2/21");
  EXPECT_EQ(normalize_answer("x = \\frac{4}{2}", AnswerKind::fraction), "2");
  EXPECT_FALSE(normalize_answer("seven halves", AnswerKind::fraction));
}

TEST(MixedNumber, Forms) {
  EXPECT_EQ(normalize_answer("3 1/2", AnswerKind::mixed_number), "3 1/2");
  EXPECT_EQ(normalize_answer("7/2", AnswerKind::mixed_number), "3 1/2");
  EXPECT_EQ(normalize_answer("2\\frac{2}{4}", AnswerKind::mixed_number), "2 1/2");
  EXPECT_EQ(normalize_answer("4/2", AnswerKind::mixed_number), "2");
}

TEST(Numeric, UnitsAndTolerance) {
  EXPECT_EQ(normalize_answer("46°", AnswerKind::numeric), "46");
  EXPECT_EQ(normalize_answer("2.500", AnswerKind::numeric), "2.5");
  EXPECT_EQ(normalize_answer("1,234", AnswerKind::numeric), "1234");
  EXPECT_TRUE(grade("the answer is 0.3333333", "1/3", AnswerKind::numeric).correct);
  EXPECT_FALSE(grade("the answer is 0.3333", "1/3", AnswerKind::numeric).correct);
  EXPECT_TRUE(grade("so x = 20", "20", AnswerKind::numeric).correct);
}

TEST(Extraction, PriorityOrder) {
  // "answer is" beats a later math span
  EXPECT_EQ(extract_final_answer("The answer is 5. Check: $2+3$", AnswerKind::numeric), "5");
  EXPECT_EQ(extract_final_answer("Therefore, the answer is $\\frac{56}{65}$", AnswerKind::fraction),
            "\\frac{56}{65}");
  EXPECT_EQ(extract_final_answer("Therefore, $\\angle RPS$ is $46^\\circ$", AnswerKind::numeric), "46°");
  EXPECT_EQ(extract_final_answer("The answer is (B).", AnswerKind::multiple_choice), "B");
  EXPECT_EQ(extract_final_answer("we get 3 then 17 apples", AnswerKind::numeric), "17");
  EXPECT_FALSE(extract_final_answer("no idea at all", AnswerKind::numeric));
}

TEST(Grade, ExtractionFailureIsWrong) {
  const auto g = grade("I cannot tell.", "12", AnswerKind::numeric);
  EXPECT_FALSE(g.correct);
  EXPECT_EQ(g.reason, GradeResult::Reason::extraction_failed);
}

TEST(Grade, SpecExamples) {
  EXPECT_TRUE(grade("1/9 * 6/7 = 6/63, so the answer is 2/21", "2/21", AnswerKind::fraction).correct);
  EXPECT_TRUE(grade("r, g, n, t, t. The concatenated result is rgntt", "rgntt", AnswerKind::letter_concat)
                  .correct);
  EXPECT_TRUE(grade("180 - 160, so the answer is 20", "20", AnswerKind::numeric).correct);
  EXPECT_TRUE(grade("The answer is (C) 12", "C", AnswerKind::multiple_choice).correct);
  EXPECT_FALSE(grade("The answer is (A)", "C", AnswerKind::multiple_choice).correct);
}

TEST(Grade, UnparseableLabelIsDatasetError) {
  EXPECT_THROW(grade("the answer is 3", "three", AnswerKind::fraction), DatasetError);
  EXPECT_THROW(check_label("", AnswerKind::free_text), DatasetError);
  EXPECT_NO_THROW(check_label("2/21", AnswerKind::fraction));
}

TEST(LetterConcat, MatchesSlicingOracle) {
  std::mt19937 gen(1234);
  std::uniform_int_distribution<int> len(1, 9), count(1, 6), letter(0, 51), coin(0, 1);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::string> words(static_cast<std::size_t>(count(gen)));
    for (auto& w : words) {
      for (int i = len(gen); i > 0; --i) w += alphabet[static_cast<std::size_t>(letter(gen))];
    }
    const auto expected = testing::last_letters(words);
    auto claimed = expected;
    const bool corrupt = coin(gen) == 1;
    if (corrupt) claimed.back() = claimed.back() == 'z' ? 'a' : static_cast<char>(claimed.back() + 1);
    const auto output = "Taking the last letters gives the concatenated result is " + claimed;
    EXPECT_EQ(grade(output, expected, AnswerKind::letter_concat).correct, !corrupt) << output;
  }
}

TEST(ActionSequence, ExactStepList) {
  EXPECT_EQ(normalize_answer("1. find an apple 2. pick up the apple 3. done", AnswerKind::action_sequence),
            "find an apple, pick up the apple, done");
  EXPECT_EQ(normalize_answer("Find an apple,  pick up the apple, done", AnswerKind::action_sequence),
            "find an apple, pick up the apple, done");
}

TEST(Normalize, Idempotent) {
  const std::vector<std::pair<std::string, AnswerKind>> cases{
      {"\\frac{6}{8}", AnswerKind::fraction},   {"-14/4", AnswerKind::fraction},
      {"9/4", AnswerKind::mixed_number},        {"3.1400", AnswerKind::numeric},
      {"46°", AnswerKind::numeric},             {"1,250.50", AnswerKind::numeric},
      {"(d)", AnswerKind::multiple_choice},     {"R G n", AnswerKind::letter_concat},
      {"1. go 2. stop", AnswerKind::action_sequence}, {"  Some   Text ", AnswerKind::free_text},
  };
  for (const auto& [text, kind] : cases) {
    const auto once = normalize_answer(text, kind);
    ASSERT_TRUE(once) << text;
    EXPECT_EQ(normalize_answer(*once, kind), once) << text;
  }
}

TEST(Accuracy, Percentages) {
  auto r = [](bool c) {
    GradeResult g;
    g.correct = c;
    return g;
  };
  std::vector<GradeResult> four{r(true), r(false), r(true), r(true)};
  EXPECT_DOUBLE_EQ(accuracy(four), 75.0);
  std::vector<GradeResult> three{r(true), r(true), r(false)};
  EXPECT_NEAR(accuracy(three), 200.0 / 3.0, 1e-12);
  EXPECT_EQ(format_percent(accuracy(three)), "66.7");
  EXPECT_THROW(accuracy(std::vector<GradeResult>{}), InvalidArgument);
}

}  // namespace
}  // namespace lp
