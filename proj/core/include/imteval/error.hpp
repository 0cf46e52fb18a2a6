// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imteval {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (environment, variant) pair or scenario name that has no preset.
class UnknownPreset : public Error {
 public:
  using Error::Error;
};

/// Config file could not be parsed.
class ConfigSyntax : public Error {
 public:
  using Error::Error;
};

/// A config value violates its documented range. `field()` names the key.
class ConfigInvalid : public Error {
 public:
  ConfigInvalid(std::string field, const std::string& why)
      : Error("invalid config field '" + field + "': " + why), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class UnknownRequirement : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// TXRU port layout does not partition the panel.
class MappingError : public Error {
 public:
  using Error::Error;
};

/// Malformed external table or requirement file. `line()` is 1-based, 0 if unknown.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& why)
      : Error(line ? "line " + std::to_string(line) + ": " + why : why), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant (for example a service log that serves before arrival).
class InternalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace imteval
