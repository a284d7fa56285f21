#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moprox {

// Syntax error in an expression; offset is the byte position in the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation outside the domain of some sub-expression (or outside a box).
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& msg, std::string node)
      : std::runtime_error(msg + " in '" + node + "'"), node_(std::move(node)) {}
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// Malformed problem file or solver configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver failure (inner solve did not reach its tolerance).
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& msg, int iteration)
      : std::runtime_error(msg + " (outer iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace moprox
