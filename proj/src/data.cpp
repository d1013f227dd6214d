// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/data.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include <openssl/evp.h>

#include "lp/error.hpp"
#include "lp/grading.hpp"
#include "lp/io.hpp"
#include "lp/rng.hpp"
#include "lp/text.hpp"

namespace lp {

namespace fs = std::filesystem;

namespace {

// Salts keep the split, validation and batch streams independent when they
// share one user seed.
constexpr std::uint64_t kSplitSalt = 0x53504c4954ULL;       // "SPLIT"
constexpr std::uint64_t kValidationSalt = 0x56414c4944ULL;  // "VALID"

std::vector<std::string> ids_of(const Dataset& dataset) {
  std::vector<std::string> ids;
  ids.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) ids.push_back(s.id);
  return ids;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

const Sample& Dataset::by_id(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw DatasetError("unknown sample id '" + id + "'");
  return samples[it->second];
}

std::vector<Sample> Dataset::select(const std::vector<std::string>& ids) const {
  std::vector<Sample> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(by_id(id));
  return out;
}

Dataset make_dataset(Task task, std::vector<Sample> samples, std::string source, std::string digest) {
  Dataset d;
  d.task = std::move(task);
  d.samples = std::move(samples);
  d.source_path = std::move(source);
  d.content_digest = std::move(digest);
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& s = d.samples[i];
    if (!d.index_.emplace(s.id, i).second) {
      throw DatasetError("duplicate sample id '" + s.id + "'");
    }
    check_label(s.answer, d.task.answer_kind);
  }
  return d;
}

std::vector<Sample> load_samples(const fs::path& path, std::vector<std::size_t>* line_numbers) {
  if (!fs::exists(path)) throw DatasetError("dataset file not found: " + path.string());
  const auto body = io::read_file(path);
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(body)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    Sample s;
    try {
      s = sample_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(where + ": malformed record: " + e.what());
    } catch (const DatasetError& e) {
      throw DatasetError(where + ": " + e.what());
    }
    if (s.id.empty()) throw DatasetError(where + ": empty id");
    if (text::trim(s.answer).empty()) throw DatasetError(where + ": empty answer");
    if (s.choices.size() == 1) throw DatasetError(where + ": choices needs at least 2 entries");
    if (!seen.insert(s.id).second) throw DatasetError(where + ": duplicate id '" + s.id + "'");
    samples.push_back(std::move(s));
    if (line_numbers) line_numbers->push_back(line_no);
  }
  return samples;
}

Dataset load_dataset(const fs::path& path, const Task& task) {
  std::vector<std::size_t> lines;
  auto samples = load_samples(path, &lines);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      check_label(samples[i].answer, task.answer_kind);
    } catch (const DatasetError& e) {
      throw DatasetError(path.string() + ":" + std::to_string(lines[i]) + ": sample '" +
                         samples[i].id + "': " + e.what());
    }
  }
  return make_dataset(task, std::move(samples), path.string(), sha256_hex(io::read_file(path)));
}

Dataset load_dataset_pair(const fs::path& train, const fs::path& test, const Task& task,
                          std::size_t* train_count) {
  auto a = load_dataset(train, task);
  auto b = load_dataset(test, task);
  if (train_count) *train_count = a.samples.size();
  auto samples = a.samples;
  samples.insert(samples.end(), b.samples.begin(), b.samples.end());
  return make_dataset(task, std::move(samples), train.string() + "+" + test.string(),
                      sha256_hex(a.content_digest + b.content_digest));
}

void write_samples(const fs::path& path, const std::vector<Sample>& samples) {
  std::string body;
  for (const auto& s : samples) body += to_json(s).dump() + "\n";
  io::write_file_atomic(path, body);
}

SplitPlan split_dataset(const Dataset& dataset, SplitRatio ratio, std::uint64_t seed) {
  if (ratio.train <= 0 || ratio.test <= 0) throw SplitError("split ratio terms must be positive");
  const auto n = dataset.samples.size();
  const auto parts = static_cast<std::size_t>(ratio.train + ratio.test);
  if (n < parts) {
    throw SplitError("dataset has " + std::to_string(n) + " samples, fewer than the split ratio sum " +
                     std::to_string(parts));
  }
  auto ids = ids_of(dataset);
  Rng rng(seed ^ kSplitSalt);
  rng.shuffle(ids);
  const auto train_n = (n * static_cast<std::size_t>(ratio.train) + parts - 1) / parts;
  SplitPlan plan;
  plan.seed = seed;
  plan.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_n));
  plan.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_n), ids.end());
  return plan;
}

SplitPlan official_split(const Dataset& dataset, std::size_t train_count) {
  if (train_count > dataset.samples.size()) throw SplitError("train_count exceeds dataset size");
  const auto ids = ids_of(dataset);
  SplitPlan plan;
  plan.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));
  plan.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_count), ids.end());
  return plan;
}

SplitPlan sample_validation(const SplitPlan& plan, std::size_t size, std::uint64_t seed) {
  if (size >= plan.train_ids.size()) {
    throw SplitError("validation needs " + std::to_string(size) + " samples but the train split has " +
                     std::to_string(plan.train_ids.size()) +
                     "; lower validation_multiplier or batch_size");
  }
  Rng rng(seed ^ kValidationSalt);
  const auto picks = rng.choose(plan.train_ids.size(), size);
  std::vector<bool> taken(plan.train_ids.size(), false);
  SplitPlan out = plan;
  out.validation_ids.clear();
  for (auto i : picks) {
    taken[i] = true;
    out.validation_ids.push_back(plan.train_ids[i]);
  }
  out.train_ids.clear();
  for (std::size_t i = 0; i < plan.train_ids.size(); ++i) {
    if (!taken[i]) out.train_ids.push_back(plan.train_ids[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> make_batches(const std::vector<std::string>& train_ids,
                                                   int batch_size, int epoch, std::uint64_t seed) {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (train_ids.empty()) throw SplitError("no training samples to batch");
  auto order = train_ids;
  Rng rng(seed ^ static_cast<std::uint64_t>(epoch));
  rng.shuffle(order);
  std::vector<std::vector<std::string>> batches;
  const auto d = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < order.size(); i += d) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + d)));
  }
  return batches;
}

}  // namespace lp
