// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lp {

/// Seeded generator whose draws are identical on every platform.
///
/// std::uniform_int_distribution and std::shuffle are implementation
/// defined, so bounded draws and shuffles are done here on top of the raw
/// mt19937_64 stream (whose output sequence the standard pins down).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices out of [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> choose(std::size_t n, std::size_t k);

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lp
