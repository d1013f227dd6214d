// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Replays a run directory from its files alone and checks every accepted
// record against the gate it had to clear. Deliberately shares no code with
// the trainer: it reads raw JSON and recomputes the gates itself.

#pragma once

#include <filesystem>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace lp::audit {

struct AuditResult {
  bool ok = true;
  int revisions = 0;
  int compressions = 0;
  std::vector<std::string> lines;  // one per record, then a verdict
};

inline nlohmann::json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return nlohmann::json::parse(ss.str());
}

inline AuditResult replay(const std::filesystem::path& run_dir) {
  constexpr double eps = 1e-9;
  const auto config = read_json_file(run_dir / "config.json").at("trainer");
  const auto state = read_json_file(run_dir / "state.json");
  const double threshold = config.at("improvement_threshold").get<double>();
  const double tolerance = config.at("compression_tolerance").get<double>();
  const auto window = config.at("recent_window").get<std::size_t>();
  const auto expected = state.at("recorded_perfs").get<std::vector<double>>();
  const auto committed = state.at("history_records").get<std::size_t>();

  AuditResult result;
  auto fail = [&result](std::string msg) {
    result.ok = false;
    result.lines.push_back("FAIL " + std::move(msg));
  };
  if (expected.empty()) {
    fail("state.json has no recorded accuracies");
    return result;
  }

  std::vector<double> perfs{expected.front()};
  std::ifstream history(run_dir / "history.jsonl", std::ios::binary);
  std::string line;
  std::size_t seen = 0;
  while (seen < committed && std::getline(history, line)) {
    if (line.empty()) continue;
    ++seen;
    const auto rec = nlohmann::json::parse(line);
    const auto kind = rec.at("kind").get<std::string>();
    const double acc = rec.at("val_accuracy").get<double>();
    const int step = rec.at("step").get<int>();
    double gate = 0.0;
    if (kind == "revision") {
      const auto n = std::min(window, perfs.size());
      double sum = 0.0;
      for (std::size_t i = perfs.size() - n; i < perfs.size(); ++i) sum += perfs[i];
      gate = sum / static_cast<double>(n) + threshold;
      ++result.revisions;
    } else if (kind == "compression") {
      gate = perfs.back() - tolerance;
      ++result.compressions;
    } else {
      fail("step " + std::to_string(step) + ": unknown record kind '" + kind + "'");
      continue;
    }
    const bool cleared = acc + eps >= gate;
    const bool gate_matches = std::abs(rec.at("gate").get<double>() - gate) <= 1e-6;
    std::ostringstream msg;
    msg << "step " << step << " " << kind << " val=" << acc << " gate=" << gate;
    if (!cleared) {
      fail(msg.str() + " below gate");
    } else if (!gate_matches) {
      fail(msg.str() + " stored gate " + rec.at("gate").dump() + " disagrees");
    } else {
      result.lines.push_back("ok   " + msg.str());
    }
    perfs.push_back(acc);
  }
  if (seen != committed) {
    fail("history.jsonl has " + std::to_string(seen) + " records, state.json commits " +
         std::to_string(committed));
  }
  bool same = perfs.size() == expected.size();
  for (std::size_t i = 0; same && i < perfs.size(); ++i) same = std::abs(perfs[i] - expected[i]) <= eps;
  if (!same) fail("replayed accuracies differ from state.json recorded_perfs");
  return result;
}

}  // namespace lp::audit
