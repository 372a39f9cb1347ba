// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <optional>
#include <string>
#include <utility>

namespace datacase {

enum class Code {
  kOk = 0,
  kPolicyDenied,
  kInaccessible,
  kUnknownUnit,
  kDuplicateId,
  kInvalidTransition,
  kTimeRegression,
  kEmptyInputs,
  kErasedInput,
  kUnknownWorkload,
  kDirectoryNotEmpty,
  kUnitLive,
  kInvalidArgument,
  kLockHeld,
  kCorruption,
  kIoError,
};

const char* code_name(Code c);

class Status {
 public:
  Status() : code_(Code::kOk) {}
  Status(Code code, std::string message)
      : code_(code), message_(std::move(message)) {}

  static Status ok() { return Status(); }

  bool is_ok() const { return code_ == Code::kOk; }
  Code code() const { return code_; }
  const std::string& message() const { return message_; }
  const char* name() const { return code_name(code_); }

  std::string to_string() const {
    if (is_ok()) return "OK";
    std::string s = name();
    if (!message_.empty()) {
      s += ": ";
      s += message_;
    }
    return s;
  }

 private:
  Code code_;
  std::string message_;
};

// Value-or-status result. Callers check ok() before value().
template <typename T>
class Result {
 public:
  Result(Status st) : status_(std::move(st)) {}  // NOLINT(runtime/explicit)
  Result(T v) : value_(std::move(v)) {}          // NOLINT(runtime/explicit)

  bool is_ok() const { return status_.is_ok(); }
  const Status& status() const { return status_; }
  T& value() { return *value_; }
  const T& value() const { return *value_; }
  T take() { return std::move(*value_); }

 private:
  Status status_;
  std::optional<T> value_;
};

}  // namespace datacase
