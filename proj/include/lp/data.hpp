// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset ingestion, seeded splits, validation carve-out and batching.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lp/model.hpp"

namespace lp {

struct Dataset {
  Task task;
  std::vector<Sample> samples;
  std::string source_path;
  std::string content_digest;  // sha256 of the file bytes

  const Sample& by_id(const std::string& id) const;
  std::vector<Sample> select(const std::vector<std::string>& ids) const;

  bool operator==(const Dataset& other) const {
    return samples == other.samples && source_path == other.source_path &&
           content_digest == other.content_digest;
  }

 private:
  friend Dataset make_dataset(Task task, std::vector<Sample> samples, std::string source,
                              std::string digest);
  std::unordered_map<std::string, std::size_t> index_;
};

/// Builds the id index and validates uniqueness and labels.
Dataset make_dataset(Task task, std::vector<Sample> samples, std::string source = {},
                     std::string digest = {});

/// JSONL records {id, question, answer, choices?, meta?}, structure only.
/// Throws DatasetError naming the offending line.
std::vector<Sample> load_samples(const std::filesystem::path& path,
                                 std::vector<std::size_t>* line_numbers = nullptr);

/// load_samples plus the grader self-check of every label under the task's
/// answer kind. Order preserving.
Dataset load_dataset(const std::filesystem::path& path, const Task& task);

/// Official train/test files: concatenated, train records first.
Dataset load_dataset_pair(const std::filesystem::path& train, const std::filesystem::path& test,
                          const Task& task, std::size_t* train_count);

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples);

struct SplitPlan {
  std::vector<std::string> train_ids;  // batching pool once validation is carved out
  std::vector<std::string> validation_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;

  bool operator==(const SplitPlan&) const = default;
};

/// Seeded shuffle then contiguous split; the train side gets
/// ceil(n * train / (train + test)). Throws SplitError when too small.
SplitPlan split_dataset(const Dataset& dataset, SplitRatio ratio, std::uint64_t seed);

/// Keeps the given order: first `train_count` samples are train, the rest test.
SplitPlan official_split(const Dataset& dataset, std::size_t train_count);

/// Draws `size` validation ids from the train side without replacement and
/// removes them from the batching pool. Throws SplitError when the train side
/// would be left empty.
SplitPlan sample_validation(const SplitPlan& plan, std::size_t size, std::uint64_t seed);

/// One epoch of batches over `train_ids`, shuffled with seed ^ epoch. All
/// batches have batch_size ids except possibly the last.
std::vector<std::vector<std::string>> make_batches(const std::vector<std::string>& train_ids,
                                                   int batch_size, int epoch, std::uint64_t seed);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace lp
