// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sacti {

enum class ErrorKind {
  kInvalidArgument,
  kDimension,
  kIndex,
  kContract,
  kSchema,
  kLabelSpace,
  kNumeric,
  kIo,
  kNotFound,
  kUnavailable,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library. `field` names the offending input
// field when one exists (JSON key, CLI flag, parameter name).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message, std::string field = {});

}  // namespace sacti
