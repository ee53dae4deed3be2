#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "quasimean/detail/summation.hpp"
#include "quasimean/errors.hpp"

namespace quasimean {

/// Non-empty ordered list of finite measurements.
class Sample {
 public:
  Sample(std::initializer_list<double> values) : Sample(std::vector<double>(values)) {}

  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidSample("sample must contain at least one value");
    for (double v : values_) {
      if (!std::isfinite(v)) throw InvalidSample("sample values must be finite");
    }
  }

  explicit Sample(std::span<const double> values)
      : Sample(std::vector<double>(values.begin(), values.end())) {}

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
  [[nodiscard]] auto end() const noexcept { return values_.end(); }

 private:
  std::vector<double> values_;
};

/// Nonnegative weights summing to one within kSumTolerance.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  WeightVector(std::initializer_list<double> weights)
      : WeightVector(std::vector<double>(weights)) {}

  explicit WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    validate_entries(weights_);
    const double total = sum(weights_);
    if (std::fabs(total - 1.0) > kSumTolerance) {
      throw InvalidWeights("weights must sum to 1 (sum is " + std::to_string(total) + ")");
    }
  }

  /// Uniform weights 1/n.
  static WeightVector uniform(std::size_t n) {
    if (n == 0) throw InvalidWeights("weight vector must not be empty");
    return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  /// Divides by the total instead of rejecting a total other than one.
  static WeightVector renormalized(std::vector<double> weights) {
    validate_entries(weights);
    const double total = sum(weights);
    if (!(total > 0.0)) throw InvalidWeights("weights sum to zero");
    for (double& w : weights) w /= total;
    return WeightVector(std::move(weights), Unchecked{});
  }

  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return weights_[i]; }

 private:
  struct Unchecked {};
  WeightVector(std::vector<double> weights, Unchecked) : weights_(std::move(weights)) {}

  static void validate_entries(const std::vector<double>& weights) {
    if (weights.empty()) throw InvalidWeights("weight vector must not be empty");
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw InvalidWeights("weights must be finite and nonnegative");
    }
  }

  static double sum(const std::vector<double>& weights) {
    detail::CompensatedSum s;
    for (double w : weights) s += w;
    return s.value();
  }

  std::vector<double> weights_;
};

}  // namespace quasimean
