#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace embdim {

// Precondition or invariant violation on numeric inputs.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A single dataset record that cannot be used (skipped by scans).
class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MergeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::uint64_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  explicit IoError(const std::string& what) : std::runtime_error(what) {}

  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_ = 0;
};

}  // namespace embdim
