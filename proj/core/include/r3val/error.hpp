#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace r3v {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid schedule configuration, device parameters, or other user input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownVariantError : public Error {
 public:
  explicit UnknownVariantError(const std::string& variant)
      : Error("unknown variant '" + variant + "'"), variant_(variant) {}

  const std::string& variant() const noexcept { return variant_; }

 private:
  std::string variant_;
};

/// Malformed input file. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A corpus or campaign whose shape does not match the schedule it is paired with.
class StructureMismatch : public Error {
 public:
  using Error::Error;
};

enum class BackendFailure {
  kNotSetUp,
  kExhausted,
  kDischarged,
  kSpawn,
  kTimeout,
  kExitStatus,
  kParse,
};

class BackendError : public Error {
 public:
  BackendError(BackendFailure kind, const std::string& what) : Error(what), kind_(kind) {}

  BackendFailure kind() const noexcept { return kind_; }

 private:
  BackendFailure kind_;
};

}  // namespace r3v
