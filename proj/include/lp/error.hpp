// Copyright (c) 2026, nlprog contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lp {

/// Base of every error raised by the library. Callers that only care about
/// "something in the pipeline failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (empty revision, empty wrong set...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class CredentialError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ThrottleError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Raised by the mock backend when no scripted rule matches. Carries the
/// full prompt so a failing test shows what was actually asked.
class UnmatchedPromptError : public BackendError {
 public:
  explicit UnmatchedPromptError(std::string prompt)
      : BackendError("mock backend: no rule matches prompt:\n" + prompt),
        prompt_(std::move(prompt)) {}

  const std::string& prompt() const noexcept { return prompt_; }

 private:
  std::string prompt_;
};

}  // namespace lp
