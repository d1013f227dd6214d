// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Final-answer extraction and per-kind grading.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "lp/model.hpp"

namespace lp {

struct GradeResult {
  enum class Reason { match, mismatch, extraction_failed };

  std::string extracted;
  std::string normalized;  // empty when the prediction did not normalize
  bool correct = false;
  Reason reason = Reason::mismatch;
};

struct Rational {
  long long num = 0;
  long long den = 1;  // > 0, gcd(num, den) == 1 once reduced

  bool operator==(const Rational&) const = default;
};

/// Reduced rational from "a/b", "w a/b", "\frac{a}{b}", "w\frac{a}{b}",
/// integers or finite decimals. Uses the text after the last '='.
std::optional<Rational> parse_rational(std::string_view text);

/// Final answer text in priority order: last "answer is" clause, last
/// math-delimited expression, then a kind-specific fallback. std::nullopt
/// when nothing can be extracted.
std::optional<std::string> extract_final_answer(std::string_view output, AnswerKind kind);

/// Canonical form used for comparison; std::nullopt when the text does not
/// parse under `kind`. Idempotent on its own output.
std::optional<std::string> normalize_answer(std::string_view text, AnswerKind kind);

/// Numeric kinds also accept an absolute difference of at most this.
inline constexpr double kNumericTolerance = 1e-6;

/// Throws DatasetError when the label itself does not normalize.
GradeResult grade(std::string_view output, std::string_view label, AnswerKind kind);

/// Throws DatasetError unless grade(label, label, kind) is correct.
void check_label(std::string_view label, AnswerKind kind);

/// 100 * correct / n. Throws InvalidArgument on an empty list.
double accuracy(std::span<const GradeResult> results);

}  // namespace lp
