#pragma once

#include <stdexcept>
#include <string>

namespace cayrs {

enum class ErrorCategory {
  Input,   // malformed or inconsistent user input
  Domain,  // well-formed input the engine cannot satisfy
};

/// Base class of every engine error. `name()` is the stable identifier
/// surfaced in machine-readable output.
class Error : public std::runtime_error {
 public:
  Error(std::string name, ErrorCategory category, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)), category_(category) {}

  const std::string& name() const noexcept { return name_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string name_;
  ErrorCategory category_;
};

inline Error inputError(std::string name, const std::string& message) {
  return Error(std::move(name), ErrorCategory::Input, message);
}

inline Error domainError(std::string name, const std::string& message) {
  return Error(std::move(name), ErrorCategory::Domain, message);
}

/// Raised when a construction step cannot be placed for the requested base
/// length; `step()` is the zero-based index of the failing step.
class Unrealizable : public Error {
 public:
  Unrealizable(std::size_t step, const std::string& message)
      : Error("Unrealizable", ErrorCategory::Domain, message), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace cayrs
