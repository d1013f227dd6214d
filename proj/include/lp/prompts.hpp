// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Rendering of the five prompt families. Templates use named slots such as
// {question}; substitution is a single pass over the template, so braces in
// substituted values (LaTeX in questions, say) are left alone.

#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "lp/model.hpp"

namespace lp {

inline constexpr const char* kCotTrigger = "Let's think step by step";
inline constexpr const char* kProgramHeader = "Natural language program:";
inline constexpr const char* kEmptyProgramMarker = "(empty)";

struct PromptBundle {
  /// Slots: {demos} {program} {question} {cot_trigger}. {program} expands to
  /// the header plus program text, or nothing for an empty program.
  std::string guided_inference_tpl;
  /// Slots: {question}.
  std::string self_program_tpl;
  /// Slots: {wrong_cases} {prev_program}.
  std::string revision_tpl;
  /// Slots: {revision} {max_solutions}.
  std::string revision_compress_tpl;
  /// Slots: {program} {max_solutions}.
  std::string program_compress_tpl;
  std::string cot_trigger = kCotTrigger;

  static PromptBundle defaults();

  /// Replaces templates for which <dir>/<name>.txt exists: guided_inference,
  /// self_program, revision, revision_compress, program_compress.
  static PromptBundle with_overrides(const std::filesystem::path& dir);
};

/// Fills {name} slots in one pass. Unknown slots are kept verbatim.
std::string fill_template(std::string_view tpl,
                          std::span<const std::pair<std::string_view, std::string_view>> slots);

/// "five", "ten", ... for 1..10, digits otherwise.
std::string number_word(int n);

/// Question followed by lettered answer choices when present.
std::string render_question(const Sample& sample);

std::string render_guided_inference(const Task& task, const Program& program, const Sample& sample,
                                    const PromptBundle& bundle = PromptBundle::defaults());

std::string render_self_program(const Sample& sample,
                                const PromptBundle& bundle = PromptBundle::defaults());

/// Throws InvalidArgument on an empty wrong list.
std::string render_revision(std::span<const WrongExample> wrong, const Program& prev_program,
                            const PromptBundle& bundle = PromptBundle::defaults());

/// Throws InvalidArgument on blank revision text.
std::string render_revision_compression(std::string_view revision, int max_solutions,
                                        const PromptBundle& bundle = PromptBundle::defaults());

/// Throws InvalidArgument on an empty program.
std::string render_program_compression(const Program& program, int max_solutions,
                                       const PromptBundle& bundle = PromptBundle::defaults());

}  // namespace lp
