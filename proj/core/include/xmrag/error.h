// Copyright 2026 The xmrag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace xmrag {

//! Error categories; the numeric values double as CLI exit codes.
enum class ErrorKind : int {
  kUsage = 1,
  kData = 2,
  kService = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

//! Bad arguments or configuration.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string &message)
      : Error(ErrorKind::kUsage, message) {}
};

//! Malformed or inconsistent input data (files, shapes, invariants).
class DataError : public Error {
 public:
  explicit DataError(const std::string &message)
      : Error(ErrorKind::kData, message) {}
};

//! Failure talking to an external service (LLM or image generator).
class ServiceError : public Error {
 public:
  explicit ServiceError(const std::string &message)
      : Error(ErrorKind::kService, message) {}
};

//! The service answered, but the answer could not be parsed.
class CompletionParseError : public ServiceError {
 public:
  CompletionParseError(const std::string &message, std::string completion)
      : ServiceError(message), completion_(std::move(completion)) {}

  const std::string &completion() const noexcept { return completion_; }

 private:
  std::string completion_;
};

//! A NaN or infinity showed up inside a numeric pipeline stage.
class NumericError : public DataError {
 public:
  NumericError(std::string stage, const std::string &message)
      : DataError(message), stage_(std::move(stage)) {}

  const std::string &stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace xmrag
