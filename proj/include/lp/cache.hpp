// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "lp/backend.hpp"

namespace lp {

/// On-disk response cache: one <digest>.json file per request, holding the
/// request and the response. Entries are never rewritten once present.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<CompletionResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const CompletionRequest& request,
             const CompletionResponse& response) const;

  struct Stats {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
  };
  Stats stats() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::filesystem::path dir_;
};

/// Decorates a backend with a ResponseCache. Hits come back with cached=true.
class CachingBackend : public Backend {
 public:
  CachingBackend(std::shared_ptr<Backend> inner, ResponseCache cache);

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string model_name() const override { return inner_->model_name(); }
  std::string endpoint() const override { return inner_->endpoint(); }

  const ResponseCache& cache() const { return cache_; }

 private:
  std::shared_ptr<Backend> inner_;
  ResponseCache cache_;
};

}  // namespace lp
