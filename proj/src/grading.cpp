// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/grading.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <regex>

#include "lp/error.hpp"
#include "lp/text.hpp"

namespace lp {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string after_last_equals(std::string_view s) {
  const auto eq = s.rfind('=');
  return std::string(eq == std::string_view::npos ? s : s.substr(eq + 1));
}

// ---- cleanup of an extracted answer ------------------------------------

std::string strip_wrapping(std::string s) {
  for (bool changed = true; changed;) {
    changed = false;
    auto t = std::string(text::trim(s));
    auto strip_pair = [&](std::string_view open, std::string_view close) {
      if (t.size() >= open.size() + close.size() && t.starts_with(open) && t.ends_with(close)) {
        t = t.substr(open.size(), t.size() - open.size() - close.size());
        return true;
      }
      return false;
    };
    if (strip_pair("$$", "$$") || strip_pair("$", "$") || strip_pair("\\(", "\\)") ||
        strip_pair("\\[", "\\]") || strip_pair("**", "**") || strip_pair("\"", "\"") ||
        strip_pair("'", "'") || strip_pair("`", "`")) {
      changed = true;
    }
    if (t.starts_with("\\boxed{") && t.ends_with("}")) {
      t = t.substr(7, t.size() - 8);
      changed = true;
    }
    while (!t.empty() && (t.back() == '.' || t.back() == ',' || t.back() == ';' || t.back() == '!')) {
      t.pop_back();
      changed = true;
    }
    while (!t.empty() && (t.front() == ':' || t.front() == ',')) {
      t.erase(t.begin());
      changed = true;
    }
    s = std::string(text::trim(t));
  }
  return s;
}

std::string clean_answer(std::string s) {
  s = text::replace_all(std::move(s), "^{\\circ}", "°");
  s = text::replace_all(std::move(s), "^\\circ", "°");
  s = text::replace_all(std::move(s), "\\circ", "°");
  s = text::replace_all(std::move(s), "\\degree", "°");
  return strip_wrapping(std::move(s));
}

// ---- extraction stages ---------------------------------------------------

std::optional<std::string> answer_is_clause(std::string_view output) {
  const auto lower = text::to_lower(output);
  const std::string_view marker = "answer is";
  const auto pos = lower.rfind(marker);
  if (pos == std::string::npos) return std::nullopt;
  std::string_view rest = output.substr(pos + marker.size());
  if (const auto nl = rest.find('\n'); nl != std::string_view::npos) rest = rest.substr(0, nl);
  // Sentence end; decimals never have whitespace after their point.
  for (std::size_t i = 0; i + 1 < rest.size(); ++i) {
    if (rest[i] == '.' && std::isspace(static_cast<unsigned char>(rest[i + 1]))) {
      rest = rest.substr(0, i);
      break;
    }
  }
  auto cleaned = clean_answer(std::string(rest));
  if (cleaned.empty()) return std::nullopt;
  return cleaned;
}

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the closing delimiter
  std::string content;
};

std::optional<Span> last_boxed(std::string_view s) {
  const auto pos = s.rfind("\\boxed{");
  if (pos == std::string_view::npos) return std::nullopt;
  int depth = 0;
  for (std::size_t i = pos + 6; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth == 0) {
      return Span{pos, i + 1, std::string(s.substr(pos + 7, i - pos - 7))};
    }
  }
  return std::nullopt;
}

std::optional<Span> last_dollar_pair(std::string_view s) {
  std::vector<std::size_t> marks;
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '$' || (i > 0 && s[i - 1] == '\\')) continue;
    const std::size_t w = (i + 1 < s.size() && s[i + 1] == '$') ? 2 : 1;
    marks.push_back(i);
    widths.push_back(w);
    i += w - 1;
  }
  if (marks.size() < 2) return std::nullopt;
  const std::size_t last_close = marks.size() % 2 == 0 ? marks.size() - 1 : marks.size() - 2;
  const auto open = marks[last_close - 1];
  const auto open_w = widths[last_close - 1];
  const auto close = marks[last_close];
  return Span{open, close + widths[last_close],
              std::string(s.substr(open + open_w, close - open - open_w))};
}

std::optional<Span> last_paren_math(std::string_view s) {
  const auto open = s.rfind("\\(");
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = s.find("\\)", open + 2);
  if (close == std::string_view::npos) return std::nullopt;
  return Span{open, close + 2, std::string(s.substr(open + 2, close - open - 2))};
}

std::optional<std::string> last_math_expression(std::string_view output) {
  std::optional<Span> best;
  for (auto candidate : {last_boxed(output), last_dollar_pair(output), last_paren_math(output)}) {
    if (candidate && (!best || candidate->end > best->end)) best = candidate;
  }
  if (!best) return std::nullopt;
  auto cleaned = clean_answer(best->content);
  if (cleaned.empty()) return std::nullopt;
  return cleaned;
}

std::optional<char> find_choice_letter(std::string_view s) {
  static const std::regex kParen(R"(\(([A-Za-z])\))");
  static const std::regex kLeading(R"(^\s*([A-Za-z])(?:[).:]|\s|$))");
  static const std::regex kStandalone(R"(\b([A-H])\b)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(s.begin(), s.end(), m, kParen)) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(m.str(1)[0])));
  }
  const auto trimmed = text::trim(s);
  if (trimmed.size() == 1 && is_alpha(trimmed[0])) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(trimmed[0])));
  }
  if (std::regex_search(s.begin(), s.end(), m, kLeading)) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(m.str(1)[0])));
  }
  if (std::regex_search(s.begin(), s.end(), m, kStandalone)) return m.str(1)[0];
  return std::nullopt;
}

std::optional<char> last_choice_letter(std::string_view s) {
  static const std::regex kParen(R"(\(([A-Za-z])\))");
  static const std::regex kStandalone(R"(\b([A-H])\b)");
  std::optional<char> found;
  for (std::regex_iterator<std::string_view::const_iterator> it(s.begin(), s.end(), kParen), end;
       it != end; ++it) {
    found = static_cast<char>(std::toupper(static_cast<unsigned char>((*it)[1].str()[0])));
  }
  if (found) return found;
  const auto trimmed = text::trim(s);
  if (trimmed.size() == 1 && is_alpha(trimmed[0])) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(trimmed[0])));
  }
  for (std::regex_iterator<std::string_view::const_iterator> it(s.begin(), s.end(), kStandalone),
       end;
       it != end; ++it) {
    found = (*it)[1].str()[0];
  }
  return found;
}

// Alternation order matters: at a given position the first alternative wins.
const std::regex& rational_pattern() {
  static const std::regex re(
      R"((-?\s*\d*)\s*\\[dt]?frac\s*\{\s*(-?\d+)\s*\}\s*\{\s*(-?\d+)\s*\})"  // [w]\frac{a}{b}
      R"(|(-?\d+)\s+(\d+)\s*/\s*(\d+))"                                     // w a/b
      R"(|(-?\d+)\s*/\s*(-?\d+))"                                           // a/b
      R"(|(-?\d*\.\d+|-?\d+))");                                            // decimal
  return re;
}

std::optional<std::string> last_rational_text(std::string_view s) {
  std::optional<std::string> found;
  for (std::regex_iterator<std::string_view::const_iterator> it(s.begin(), s.end(),
                                                                 rational_pattern()),
       end;
       it != end; ++it) {
    found = it->str();
  }
  return found;
}

std::optional<std::string> last_number_text(std::string_view s) {
  static const std::regex re(R"(\\[dt]?frac\{-?\d+\}\{-?\d+\}|-?\d{1,3}(?:,\d{3})+(?:\.\d+)?|-?\d+\s*/\s*\d+|-?\d*\.\d+|-?\d+)");
  std::optional<std::string> found;
  for (std::regex_iterator<std::string_view::const_iterator> it(s.begin(), s.end(), re), end;
       it != end; ++it) {
    found = it->str();
  }
  return found;
}

std::optional<std::string> last_nonempty_line(std::string_view s) {
  const auto lines = text::split_lines(s);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    auto cleaned = clean_answer(*it);
    if (!cleaned.empty()) return cleaned;
  }
  return std::nullopt;
}

std::optional<std::string> last_letter_run(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0 && !is_alpha(s[end - 1])) --end;
  if (end == 0) return std::nullopt;
  std::size_t begin = end;
  while (begin > 0 && is_alpha(s[begin - 1])) --begin;
  return std::string(s.substr(begin, end - begin));
}

std::optional<std::string> kind_fallback(std::string_view output, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::multiple_choice:
      if (auto c = last_choice_letter(output)) return std::string(1, *c);
      return std::nullopt;
    case AnswerKind::numeric:
    case AnswerKind::sig_figs_count:
      return last_number_text(output);
    case AnswerKind::fraction:
    case AnswerKind::mixed_number:
      return last_rational_text(output);
    case AnswerKind::letter_concat:
      return last_letter_run(output);
    case AnswerKind::action_sequence:
    case AnswerKind::free_text:
      return last_nonempty_line(output);
  }
  return std::nullopt;
}

// ---- rationals -------------------------------------------------------------

bool checked_mul_add(long long& acc, long long mul, long long add) {
  return !__builtin_mul_overflow(acc, mul, &acc) && !__builtin_add_overflow(acc, add, &acc);
}

std::optional<long long> parse_int(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
          s.end());
  if (s.empty() || s == "-") return std::nullopt;
  bool negative = false;
  std::size_t i = 0;
  if (s[0] == '-') {
    negative = true;
    i = 1;
  }
  long long v = 0;
  for (; i < s.size(); ++i) {
    if (!is_digit(s[i])) return std::nullopt;
    if (!checked_mul_add(v, 10, s[i] - '0')) return std::nullopt;
  }
  return negative ? -v : v;
}

std::optional<Rational> make_rational(long long num, long long den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    if (num == std::numeric_limits<long long>::min() || den == std::numeric_limits<long long>::min()) {
      return std::nullopt;
    }
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

std::optional<Rational> add_whole(long long whole, bool negative, Rational frac) {
  // |value| = |whole| + frac, sign taken from the whole part.
  long long w = whole < 0 ? -whole : whole;
  long long n = 0;
  if (__builtin_mul_overflow(w, frac.den, &n) || __builtin_add_overflow(n, frac.num, &n)) {
    return std::nullopt;
  }
  return make_rational(negative ? -n : n, frac.den);
}

std::optional<Rational> parse_decimal(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) {
    auto v = parse_int(s);
    if (!v) return std::nullopt;
    return Rational{*v, 1};
  }
  bool negative = !s.empty() && s[0] == '-';
  const std::string int_part = s.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
  const std::string frac_part = s.substr(dot + 1);
  long long num = 0;
  long long den = 1;
  for (char c : int_part) {
    if (!checked_mul_add(num, 10, c - '0')) return std::nullopt;
  }
  for (char c : frac_part) {
    if (!checked_mul_add(num, 10, c - '0')) return std::nullopt;
    if (__builtin_mul_overflow(den, 10LL, &den)) return std::nullopt;
  }
  return make_rational(negative ? -num : num, den);
}

std::optional<Rational> rational_from_match(const std::match_results<std::string::const_iterator>& m) {
  if (m[2].matched) {  // [w]\frac{a}{b}
    auto a = parse_int(m.str(2));
    auto b = parse_int(m.str(3));
    if (!a || !b) return std::nullopt;
    auto frac = make_rational(*a, *b);
    if (!frac) return std::nullopt;
    std::string whole = m.str(1);
    whole.erase(std::remove_if(whole.begin(), whole.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                whole.end());
    if (whole.empty()) return frac;
    if (whole == "-") return make_rational(-frac->num, frac->den);
    auto w = parse_int(whole);
    if (!w) return std::nullopt;
    if (frac->num < 0) return std::nullopt;  // "2\frac{-1}{3}" is not a mixed number
    return add_whole(*w, whole[0] == '-', *frac);
  }
  if (m[4].matched) {  // w a/b
    auto w = parse_int(m.str(4));
    auto a = parse_int(m.str(5));
    auto b = parse_int(m.str(6));
    if (!w || !a || !b) return std::nullopt;
    auto frac = make_rational(*a, *b);
    if (!frac) return std::nullopt;
    return add_whole(*w, m.str(4)[0] == '-', *frac);
  }
  if (m[7].matched) {  // a/b
    auto a = parse_int(m.str(7));
    auto b = parse_int(m.str(8));
    if (!a || !b) return std::nullopt;
    return make_rational(*a, *b);
  }
  return parse_decimal(m.str(9));
}

std::string to_string(Rational r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string to_mixed_string(Rational r) {
  const long long abs_num = r.num < 0 ? -r.num : r.num;
  if (r.den == 1 || abs_num < r.den) return to_string(r);
  const long long whole = abs_num / r.den;
  const long long rest = abs_num % r.den;
  return (r.num < 0 ? "-" : "") + std::to_string(whole) + " " + std::to_string(rest) + "/" +
         std::to_string(r.den);
}

// Exact decimal when the denominator only has factors 2 and 5, otherwise
// twelve fractional digits.
std::string rational_to_decimal(Rational r) {
  long long d = r.den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  const int k = std::max(twos, fives);
  if (d == 1 && k <= 17) {
    long long scale = 1;
    for (int i = 0; i < k; ++i) scale *= 10;
    long long scaled = 0;
    if (!__builtin_mul_overflow(r.num, scale / r.den, &scaled)) {
      const bool negative = scaled < 0;
      std::string digits = std::to_string(negative ? -scaled : scaled);
      if (k > 0) {
        if (static_cast<int>(digits.size()) <= k) digits.insert(0, static_cast<std::size_t>(k) - digits.size() + 1, '0');
        digits.insert(digits.size() - static_cast<std::size_t>(k), ".");
      }
      return (negative ? "-" : "") + digits;
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", static_cast<double>(r.num) / static_cast<double>(r.den));
  return buf;
}

// Canonical decimal: no leading zeros, no trailing fractional zeros, no "-0".
std::string canonical_decimal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s[0] == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  std::string int_part(s.substr(0, s.find('.')));
  std::string frac_part = s.find('.') == std::string_view::npos ? "" : std::string(s.substr(s.find('.') + 1));
  while (int_part.size() > 1 && int_part[0] == '0') int_part.erase(0, 1);
  if (int_part.empty()) int_part = "0";
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out = int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  if (out == "0") negative = false;
  return (negative ? "-" : "") + out;
}

std::string strip_units(std::string s) {
  for (std::string_view unit : {"°", "\\circ", "\\%", "%", "$", "\\!", "\\,", "^"}) {
    s = text::replace_all(std::move(s), unit, "");
  }
  return s;
}

std::optional<std::string> normalize_numeric(std::string_view input) {
  auto s = strip_units(after_last_equals(input));
  static const std::regex kThousands(R"((\d),(\d{3})(?!\d))");
  for (std::string prev; prev != s;) {
    prev = s;
    s = std::regex_replace(s, kThousands, "$1$2");
  }
  static const std::regex kNumber(
      R"(\\[dt]?frac\{(-?\d+)\}\{(-?\d+)\}|(-?\d+)\s*/\s*(\d+)|(-?\d*\.\d+|-?\d+))");
  std::smatch m;
  if (!std::regex_search(s, m, kNumber)) return std::nullopt;
  if (m[1].matched || m[3].matched) {
    auto a = parse_int(m[1].matched ? m.str(1) : m.str(3));
    auto b = parse_int(m[1].matched ? m.str(2) : m.str(4));
    if (!a || !b) return std::nullopt;
    auto r = make_rational(*a, *b);
    if (!r) return std::nullopt;
    return canonical_decimal(rational_to_decimal(*r));
  }
  std::string literal = m.str(5);
  if (literal.starts_with("-.")) literal.insert(1, "0");
  if (literal.starts_with(".")) literal.insert(0, "0");
  return canonical_decimal(literal);
}

std::optional<std::string> normalize_action_sequence(std::string_view input) {
  static const std::regex kNumbering(R"((^|\s)\d+[.)](\s|$))");
  auto s = std::regex_replace(text::to_lower(input), kNumbering, ",");
  for (char sep : {'\n', ';'}) std::replace(s.begin(), s.end(), sep, ',');
  std::vector<std::string> steps;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    auto step = clean_answer(text::collapse_whitespace(
        std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (!step.empty()) steps.push_back(std::move(step));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (steps.empty()) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ", ";
    out += steps[i];
  }
  return out;
}

bool numeric_kind(AnswerKind kind) {
  return kind == AnswerKind::numeric || kind == AnswerKind::sig_figs_count;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  const auto segment = strip_wrapping(after_last_equals(text));
  std::smatch m;
  if (!std::regex_search(segment, m, rational_pattern())) return std::nullopt;
  return rational_from_match(m);
}

std::optional<std::string> extract_final_answer(std::string_view output, AnswerKind kind) {
  std::optional<std::string> found = answer_is_clause(output);
  if (!found) found = last_math_expression(output);

  if (found && kind == AnswerKind::multiple_choice) {
    // Reduce "(B) some option text" to the letter; fall through if none.
    if (auto c = find_choice_letter(*found)) return std::string(1, *c);
    found.reset();
  }
  if (found) return found;

  if (auto fallback = kind_fallback(output, kind)) {
    auto cleaned = kind == AnswerKind::multiple_choice ? *fallback : clean_answer(*fallback);
    if (!cleaned.empty()) return cleaned;
  }
  return std::nullopt;
}

std::optional<std::string> normalize_answer(std::string_view input, AnswerKind kind) {
  switch (kind) {
    case AnswerKind::fraction: {
      auto r = parse_rational(input);
      if (!r) return std::nullopt;
      return to_string(*r);
    }
    case AnswerKind::mixed_number: {
      auto r = parse_rational(input);
      if (!r) return std::nullopt;
      return to_mixed_string(*r);
    }
    case AnswerKind::numeric:
    case AnswerKind::sig_figs_count:
      return normalize_numeric(input);
    case AnswerKind::multiple_choice: {
      auto c = find_choice_letter(strip_wrapping(std::string(input)));
      if (!c) return std::nullopt;
      return std::string(1, *c);
    }
    case AnswerKind::letter_concat: {
      std::string out;
      for (char c : input) {
        if (is_alpha(c)) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      if (out.empty()) return std::nullopt;
      return out;
    }
    case AnswerKind::action_sequence:
      return normalize_action_sequence(input);
    case AnswerKind::free_text: {
      auto out = text::collapse_whitespace(text::to_lower(input));
      if (out.empty()) return std::nullopt;
      return out;
    }
  }
  return std::nullopt;
}

GradeResult grade(std::string_view output, std::string_view label, AnswerKind kind) {
  const auto expected = normalize_answer(label, kind);
  if (!expected) {
    throw DatasetError("label '" + std::string(label) + "' does not parse as " +
                       std::string(to_string(kind)));
  }

  GradeResult result;
  const auto extracted = extract_final_answer(output, kind);
  if (!extracted) {
    result.reason = GradeResult::Reason::extraction_failed;
    return result;
  }
  result.extracted = *extracted;
  const auto normalized = normalize_answer(*extracted, kind);
  if (!normalized) {
    result.reason = GradeResult::Reason::mismatch;
    return result;
  }
  result.normalized = *normalized;
  bool correct = *normalized == *expected;
  if (!correct && numeric_kind(kind)) {
    const double a = std::strtod(normalized->c_str(), nullptr);
    const double b = std::strtod(expected->c_str(), nullptr);
    correct = std::fabs(a - b) <= kNumericTolerance;
  }
  result.correct = correct;
  result.reason = correct ? GradeResult::Reason::match : GradeResult::Reason::mismatch;
  return result;
}

void check_label(std::string_view label, AnswerKind kind) {
  if (!grade(label, label, kind).correct) {
    throw DatasetError("label '" + std::string(label) + "' does not grade as correct against itself");
  }
}

double accuracy(std::span<const GradeResult> results) {
  if (results.empty()) throw InvalidArgument("accuracy of an empty result list");
  const auto correct = std::count_if(results.begin(), results.end(),
                                     [](const GradeResult& r) { return r.correct; });
  return 100.0 * static_cast<double>(correct) / static_cast<double>(results.size());
}

}  // namespace lp
