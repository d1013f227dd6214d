// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/rng.hpp"

#include <limits>
#include <numeric>
#include <sstream>

#include "lp/error.hpp"

namespace lp {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::vector<std::size_t> Rng::choose(std::size_t n, std::size_t k) {
  if (k > n) throw InvalidArgument("Rng::choose: k exceeds n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

Rng Rng::deserialize(const std::string& text) {
  Rng rng;
  std::istringstream is(text);
  is >> rng.engine_;
  if (is.fail()) throw LoadError("malformed rng state");
  return rng;
}

}  // namespace lp
