// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/checkpoint.hpp"

#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/text.hpp"

namespace lp {

namespace fs = std::filesystem;

namespace {

constexpr int kStateVersion = 1;

nlohmann::json state_to_json(const TrainState& s) {
  return {
      {"version", kStateVersion},
      {"task", s.task},
      {"step", s.step},
      {"epoch", s.epoch},
      {"batch_in_epoch", s.batch_in_epoch},
      {"program",
       {{"blocks", s.program.blocks},
        {"origin_model", s.program.origin_model},
        {"history_len", s.program.history_len}}},
      {"recorded_perfs", s.recorded_perfs},
      {"stagnant_batches", s.stagnant_batches},
      {"updates_since_compression", s.updates_since_compression},
      {"rng_state", s.rng.serialize()},
      {"stopped", s.stopped},
      {"stop_reason", to_string(s.stop_reason)},
      {"history_records", s.history.size()},
  };
}

}  // namespace

void save_checkpoint(const TrainState& state, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CheckpointError("cannot create run directory " + dir.string() + ": " + ec.message());

  std::string history;
  for (const auto& r : state.history) history += to_json(r).dump() + "\n";

  io::write_file_atomic(dir / kHistoryFile, history);
  io::write_file_atomic(dir / kProgramFile, state.program.rendered());
  io::write_file_atomic(dir / kStateFile, state_to_json(state).dump(2) + "\n");
}

TrainState load_checkpoint(const fs::path& dir) {
  const auto state_path = dir / kStateFile;
  if (!fs::exists(state_path)) {
    throw LoadError("checkpoint is missing " + state_path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(state_path));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("corrupt " + state_path.string() + ": " + e.what());
  }

  TrainState s;
  std::size_t history_records = 0;
  try {
    if (j.value("version", 0) != kStateVersion) {
      throw LoadError("unsupported state version in " + state_path.string());
    }
    s.task = j.at("task").get<std::string>();
    s.step = j.at("step").get<int>();
    s.epoch = j.at("epoch").get<int>();
    s.batch_in_epoch = j.at("batch_in_epoch").get<int>();
    const auto& p = j.at("program");
    s.program.blocks = p.at("blocks").get<std::vector<std::string>>();
    s.program.origin_model = p.at("origin_model").get<std::string>();
    s.program.history_len = p.at("history_len").get<int>();
    s.recorded_perfs = j.at("recorded_perfs").get<std::vector<double>>();
    s.stagnant_batches = j.at("stagnant_batches").get<int>();
    s.updates_since_compression = j.at("updates_since_compression").get<int>();
    s.rng = Rng::deserialize(j.at("rng_state").get<std::string>());
    s.stopped = j.at("stopped").get<bool>();
    s.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
    history_records = j.at("history_records").get<std::size_t>();
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception& e) {
    throw LoadError("corrupt " + state_path.string() + ": " + e.what());
  }
  if (s.recorded_perfs.empty()) throw LoadError("corrupt " + state_path.string() + ": recorded_perfs is empty");
  if (s.stopped && s.stop_reason == StopReason::none) {
    throw LoadError("corrupt " + state_path.string() + ": stopped without stop_reason");
  }

  const auto history_path = dir / kHistoryFile;
  if (history_records > 0 || fs::exists(history_path)) {
    if (!fs::exists(history_path)) throw LoadError("checkpoint is missing " + history_path.string());
    const auto lines = text::split_lines(io::read_file(history_path));
    std::size_t line_no = 0;
    for (const auto& line : lines) {
      ++line_no;
      if (s.history.size() == history_records) break;  // records past the commit point
      if (text::trim(line).empty()) continue;
      try {
        s.history.push_back(history_record_from_json(nlohmann::json::parse(line)));
      } catch (const std::exception& e) {
        throw LoadError("corrupt " + history_path.string() + " line " + std::to_string(line_no) +
                        ": " + e.what());
      }
    }
    if (s.history.size() != history_records) {
      throw LoadError("corrupt " + history_path.string() + ": expected " +
                      std::to_string(history_records) + " records, found " +
                      std::to_string(s.history.size()));
    }
  }
  return s;
}

}  // namespace lp
