// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// lp-audit <run_dir>: replays history.jsonl and checks every acceptance gate.

#include <iostream>

#include "replay_audit.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: lp-audit <run_dir>\n";
    return 2;
  }
  try {
    const auto r = lp::audit::replay(argv[1]);
    for (const auto& line : r.lines) std::cout << line << "\n";
    std::cout << (r.ok ? "audit passed: " : "audit FAILED: ") << r.revisions << " revisions, "
              << r.compressions << " compressions\n";
    return r.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "lp-audit: " << e.what() << "\n";
    return 1;
  }
}
