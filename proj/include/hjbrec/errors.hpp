#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hjbrec {

/// Caller violated a precondition (mismatched variable lists, bad sizes, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input lies outside the domain of a map, e.g. S^-1 passed to inverse_mellin.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Table access outside the populated index range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Adaptive quadrature gave up; carries the last two estimates.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double previous, double last)
      : std::runtime_error(what), previous_(previous), last_(last) {}

  double previous_estimate() const noexcept { return previous_; }
  double last_estimate() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

/// Galerkin linear system could not be solved. When raised from the SGA loop,
/// `history()` holds the residuals recorded before the failure.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, int iteration, std::vector<double> history = {})
      : std::runtime_error(what), iteration_(iteration), history_(std::move(history)) {}

  int iteration() const noexcept { return iteration_; }
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  int iteration_;
  std::vector<double> history_;
};

}  // namespace hjbrec
