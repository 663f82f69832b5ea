#pragma once

#include <stdexcept>
#include <string>

namespace fps {

/// Input outside an operation's mathematical domain (bad modulus, kappa_f, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mesh resolution cannot represent a requested feature.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural invariant violated by data (non-watertight mesh, unordered curve).
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string destination)
      : std::runtime_error(what + ": " + destination), destination_(std::move(destination)) {}

  const std::string& destination() const noexcept { return destination_; }

 private:
  std::string destination_;
};

/// Malformed text input; line numbers are 1-based and count the header.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, const std::string& source = {})
      : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + what),
        detail_(what),
        line_(line) {}

  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string detail_;
  std::size_t line_;
};

/// Two curves that must share a displacement grid do not.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interpolation requested outside the sampled range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace fps
