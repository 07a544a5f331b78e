// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sarvi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input table or document does not follow the expected column/key layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Argument outside the domain of an operation.
class ValueError : public Error {
 public:
  using Error::Error;
};

/// Cooperative deadline expired while training.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace sarvi
