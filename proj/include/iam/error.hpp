#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace iam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inadmissible configuration; raised before any computation starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A per-path domain violation (log of a non-positive sample, division by zero, ...).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::optional<std::size_t> path = std::nullopt,
              std::optional<std::size_t> step = std::nullopt)
      : Error(format(what, path, step)), message_(what), path_(path), step_(step) {}

  /// The message without the step and path suffix.
  const std::string& message() const { return message_; }
  std::optional<std::size_t> path() const { return path_; }
  std::optional<std::size_t> step() const { return step_; }

 private:
  static std::string format(const std::string& what, std::optional<std::size_t> path,
                            std::optional<std::size_t> step) {
    std::string msg = what;
    if (step) msg += " at step " + std::to_string(*step);
    if (path) msg += " on path " + std::to_string(*path);
    return msg;
  }

  std::string message_;
  std::optional<std::size_t> path_;
  std::optional<std::size_t> step_;
};

/// Non-finite objective or a diverging model evaluation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iam
