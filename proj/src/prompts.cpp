// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/prompts.hpp"

#include <array>

#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/text.hpp"

namespace lp {

namespace {

constexpr const char* kGuidedInference =
    "{demos}{program}Q: {question}\n"
    "A: {cot_trigger}.";

constexpr const char* kSelfProgram =
    "{question}\n"
    "You can generate general solutions to solve all questions similar to the above question.\n"
    "You can consider equations and algorithms.\n"
    "When generating one solution, you should write no more than two sentences for one solution.\n"
    "Solutions:";

constexpr const char* kRevision =
    "{wrong_cases}\n"
    "You can generate two or three new correct solutions to avoid the above wrong outputs and to "
    "solve all questions refer to the above questions.\n"
    "You must generate solutions different from those previous solutions in the previous natural "
    "language program:\n"
    "{prev_program}\n"
    "You can generate equations and Python algorithms.\n"
    "When generating one solution, you should write no more than two sentences for one solution.\n"
    "You must not generate detailed examples as we need general solutions";

constexpr const char* kRevisionCompress =
    "You should summarize the similar solutions in [{revision}] into one solution.\n"
    "You should maintain solutions for solving different situations.\n"
    "You must only output no more than {max_solutions} main solutions.\n"
    "When generating one solution, you should write no more than two sentences for one solution.";

constexpr const char* kProgramCompress =
    "You should summarize the similar solutions in [{program}] into one solution.\n"
    "You should maintain solutions for solving different situations.\n"
    "You must only output no more than {max_solutions} main solutions.\n"
    "When generating one solution, you should write no more than two sentences for one solution.";

std::string render_demos(const Task& task) {
  if (task.prompt_mode != PromptMode::few_shot_cot) return {};
  std::string out;
  for (const auto& demo : task.demos) {
    out += "Q: " + demo.question + "\n";
    out += "A: " + demo.solution + " The answer is " + demo.answer + ".\n\n";
  }
  return out;
}

}  // namespace

PromptBundle PromptBundle::defaults() {
  PromptBundle b;
  b.guided_inference_tpl = kGuidedInference;
  b.self_program_tpl = kSelfProgram;
  b.revision_tpl = kRevision;
  b.revision_compress_tpl = kRevisionCompress;
  b.program_compress_tpl = kProgramCompress;
  return b;
}

PromptBundle PromptBundle::with_overrides(const std::filesystem::path& dir) {
  auto b = defaults();
  const std::array<std::pair<const char*, std::string*>, 5> files{{
      {"guided_inference.txt", &b.guided_inference_tpl},
      {"self_program.txt", &b.self_program_tpl},
      {"revision.txt", &b.revision_tpl},
      {"revision_compress.txt", &b.revision_compress_tpl},
      {"program_compress.txt", &b.program_compress_tpl},
  }};
  for (const auto& [name, slot] : files) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) *slot = io::read_file(path);
  }
  return b;
}

std::string fill_template(std::string_view tpl,
                          std::span<const std::pair<std::string_view, std::string_view>> slots) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto name = tpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [slot, value] : slots) {
          if (slot == name) {
            out += value;
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out += tpl[i++];
  }
  return out;
}

std::string number_word(int n) {
  static constexpr std::array<const char*, 11> kWords{
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) return kWords[static_cast<std::size_t>(n)];
  return std::to_string(n);
}

std::string render_question(const Sample& sample) {
  if (sample.choices.empty()) return sample.question;
  std::string out = sample.question + "\nAnswer Choices:";
  for (std::size_t i = 0; i < sample.choices.size(); ++i) {
    out += " (";
    out += static_cast<char>('A' + i);
    out += ") " + sample.choices[i];
  }
  return out;
}

std::string render_guided_inference(const Task& task, const Program& program, const Sample& sample,
                                    const PromptBundle& bundle) {
  const auto demos = render_demos(task);
  const auto program_block =
      program.empty() ? std::string{} : std::string(kProgramHeader) + "\n" + program.rendered() + "\n\n";
  const auto question = render_question(sample);
  const std::array<std::pair<std::string_view, std::string_view>, 4> slots{{
      {"demos", demos},
      {"program", program_block},
      {"question", question},
      {"cot_trigger", bundle.cot_trigger},
  }};
  return fill_template(bundle.guided_inference_tpl, slots);
}

std::string render_self_program(const Sample& sample, const PromptBundle& bundle) {
  const auto question = render_question(sample);
  const std::array<std::pair<std::string_view, std::string_view>, 1> slots{{{"question", question}}};
  return fill_template(bundle.self_program_tpl, slots);
}

std::string render_revision(std::span<const WrongExample> wrong, const Program& prev_program,
                            const PromptBundle& bundle) {
  if (wrong.empty()) throw InvalidArgument("render_revision: no wrong examples");
  std::string cases;
  for (std::size_t i = 0; i < wrong.size(); ++i) {
    if (i) cases += "\n";
    cases += "Question: " + render_question(wrong[i].sample) + "\n";
    cases += "Wrong output: " + std::string(text::trim(wrong[i].prediction)) + "\n";
    cases += "Correct answer: " + wrong[i].sample.answer + "\n";
  }
  const auto prev = prev_program.empty() ? std::string(kEmptyProgramMarker) : prev_program.rendered();
  const std::array<std::pair<std::string_view, std::string_view>, 2> slots{{
      {"wrong_cases", cases},
      {"prev_program", prev},
  }};
  return fill_template(bundle.revision_tpl, slots);
}

std::string render_revision_compression(std::string_view revision, int max_solutions,
                                        const PromptBundle& bundle) {
  if (text::trim(revision).empty()) {
    throw InvalidArgument("render_revision_compression: revision is empty");
  }
  const auto count = number_word(max_solutions);
  const std::array<std::pair<std::string_view, std::string_view>, 2> slots{{
      {"revision", revision},
      {"max_solutions", count},
  }};
  return fill_template(bundle.revision_compress_tpl, slots);
}

std::string render_program_compression(const Program& program, int max_solutions,
                                       const PromptBundle& bundle) {
  if (program.empty()) throw InvalidArgument("render_program_compression: program is empty");
  const auto rendered = program.rendered();
  const auto count = number_word(max_solutions);
  const std::array<std::pair<std::string_view, std::string_view>, 2> slots{{
      {"program", rendered},
      {"max_solutions", count},
  }};
  return fill_template(bundle.program_compress_tpl, slots);
}

}  // namespace lp
