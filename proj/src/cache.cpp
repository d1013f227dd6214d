// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#include "lp/cache.hpp"

#include "lp/error.hpp"
#include "lp/io.hpp"
#include "lp/log.hpp"

namespace lp {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::entry_path(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<CompletionResponse> ResponseCache::lookup(const std::string& key) const {
  const auto path = entry_path(key);
  if (!fs::exists(path)) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(io::read_file(path));
    auto response = completion_response_from_json(j.at("response"));
    response.cached = true;
    return response;
  } catch (const std::exception& e) {
    log::warn("ignoring unreadable cache entry " + path.string() + ": " + e.what());
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const CompletionRequest& request,
                          const CompletionResponse& response) const {
  const auto path = entry_path(key);
  if (fs::exists(path)) return;
  const nlohmann::json record{
      {"key", key},
      {"request", to_json(request)},
      {"response", to_json(response)},
  };
  io::write_file_atomic(path, record.dump(2) + "\n");
}

ResponseCache::Stats ResponseCache::stats() const {
  Stats s;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    ++s.entries;
    s.bytes += entry.file_size();
  }
  return s;
}

CachingBackend::CachingBackend(std::shared_ptr<Backend> inner, ResponseCache cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
  if (!inner_) throw InvalidArgument("CachingBackend needs an inner backend");
}

CompletionResponse CachingBackend::complete(const CompletionRequest& request) {
  CompletionRequest resolved = request;
  if (resolved.model.empty()) resolved.model = inner_->model_name();
  const auto key = cache_key(resolved, inner_->endpoint());
  if (auto hit = cache_.lookup(key)) return *hit;

  auto response = inner_->complete(resolved);
  response.cached = false;
  if (response.finish_reason != FinishReason::error) cache_.store(key, resolved, response);
  return response;
}

}  // namespace lp
