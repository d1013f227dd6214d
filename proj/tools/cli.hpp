// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace lp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `lp` binary, callable in-process from tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lp::cli
