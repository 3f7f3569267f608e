#pragma once

#include <stdexcept>
#include <string>

namespace lccgan {

/// Shape or extent mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value (bad fraction, unknown kind, d > M, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents (wrong magic, bad checkpoint schema).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable or truncated.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition of an operation (non-scalar loss, non-finite leaf).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Training produced a non-finite loss.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::string snapshot)
      : std::runtime_error(what), snapshot_(std::move(snapshot)) {}
  const std::string& snapshot() const noexcept { return snapshot_; }

 private:
  std::string snapshot_;
};

}  // namespace lccgan
