#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quasimean {

/// Base of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the domain of a generator or aggregate.
class DomainError : public error {
 public:
  DomainError(const std::string& what, double value)
      : error(what + " (value " + std::to_string(value) + ")"), value_(value) {}

  [[nodiscard]] double offending_value() const noexcept { return value_; }

 private:
  double value_;
};

/// The stable evaluation path could not represent the result.
class OverflowError : public error {
 public:
  using error::error;
};

class InvalidSample : public error {
 public:
  using error::error;
};

class InvalidWeights : public error {
 public:
  using error::error;
};

class LengthMismatch : public error {
 public:
  LengthMismatch(std::size_t expected, std::size_t actual)
      : error("length mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class UnknownMeanName : public error {
 public:
  explicit UnknownMeanName(const std::string& name) : error("unknown mean name '" + name + "'") {}
};

class UnknownAggregate : public error {
 public:
  explicit UnknownAggregate(const std::string& name)
      : error("unknown aggregate name '" + name + "'") {}
};

class UnknownAggregator : public error {
 public:
  explicit UnknownAggregator(const std::string& name)
      : error("unknown aggregator '" + name + "'") {}
};

/// Bisection did not reach its tolerance within the iteration cap.
class NonConvergence : public error {
 public:
  using error::error;
};

/// A caller-supplied evaluator returned a non-finite value.
class EvaluatorFailure : public error {
 public:
  using error::error;
};

/// Exhaustive counterexample search found nothing.
class NoWitnessFound : public error {
 public:
  using error::error;
};

class ParseError : public error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Some rows carry a weight and others do not.
class MixedWeightError : public error {
 public:
  using error::error;
};

}  // namespace quasimean
