#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quasimean/detail/summation.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/sample.hpp"

namespace quasimean {

namespace detail {

struct WeightedPoint {
  double x;
  double w;
  friend auto operator<=>(const WeightedPoint&, const WeightedPoint&) = default;
};

// Points with positive weight, ascending by value. Sorting fixes the summation
// order, so a permutation of the input gives a bit-identical result.
inline std::vector<WeightedPoint> sorted_support(std::span<const double> values,
                                                 std::span<const double> weights) {
  std::vector<WeightedPoint> points;
  points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w > 0.0) points.push_back({values[i], w});
  }
  std::sort(points.begin(), points.end());
  return points;
}

// sum(w * fn(x)) / sum(w)
template <class Fn>
double weighted_average(const std::vector<WeightedPoint>& points, Fn&& fn) {
  CompensatedSum num;
  CompensatedSum den;
  for (const auto& p : points) {
    num += p.w * fn(p.x);
    den += p.w;
  }
  return num.value() / den.value();
}

// log of the weighted average of exp(d(x)), shifted by the maximum exponent.
template <class Exponent>
double log_mean_exp(const std::vector<WeightedPoint>& points, Exponent&& d) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::max(m, d(p.x));
  const double avg = weighted_average(points, [&](double x) { return std::expm1(d(x) - m); });
  return m + std::log1p(avg);
}

inline double quasi_mean_of(const std::vector<WeightedPoint>& points, const Generator& g) {
  const double lo = points.front().x;
  const double hi = points.back().x;
  double r = 0.0;
  switch (g.kind()) {
    case GeneratorKind::identity: {
      r = weighted_average(points, [](double x) { return x; });
      if (!std::isfinite(r)) {
        const double s = std::max(std::fabs(lo), std::fabs(hi));
        r = s * weighted_average(points, [s](double x) { return x / s; });
      }
      break;
    }
    case GeneratorKind::square: {
      if (hi == 0.0) return 0.0;
      if (hi >= 1e-150 && hi <= 1e150) {
        r = std::sqrt(weighted_average(points, [](double x) { return x * x; }));
      } else {
        r = hi * std::sqrt(weighted_average(points, [hi](double x) {
              const double t = x / hi;
              return t * t;
            }));
      }
      break;
    }
    case GeneratorKind::log:
      r = std::exp(weighted_average(points, [](double x) { return std::log(x); }));
      break;
    case GeneratorKind::reciprocal: {
      r = 1.0 / weighted_average(points, [](double x) { return 1.0 / x; });
      if (!std::isfinite(r) || r == 0.0) {
        r = lo / weighted_average(points, [lo](double x) { return lo / x; });
      }
      break;
    }
    case GeneratorKind::exp:
      r = log_mean_exp(points, [](double x) { return x; });
      break;
    case GeneratorKind::power: {
      if (hi == 0.0) return 0.0;
      const double alpha = g.alpha();
      r = std::exp(log_mean_exp(points, [alpha](double x) { return alpha * std::log(x); }) / alpha);
      break;
    }
  }
  if (!std::isfinite(r)) throw OverflowError(g.name() + ": mean not representable");
  return std::clamp(r, lo, hi);
}

inline void check_domain(std::span<const double> values, const Generator& g) {
  const Interval dom = g.domain();
  for (double v : values) {
    if (!dom.contains(v)) throw DomainError(g.name() + ": value outside generator domain", v);
  }
}

}  // namespace detail

/// Quasi-arithmetic mean f^-1((1/n) sum f(x_i)).
///
/// Each generator kind has its own overflow-safe evaluation: the geometric
/// mean averages logarithms, exp and power means shift by the largest exponent
/// before exponentiating. The result is clamped to [min(s), max(s)].
inline double quasi_mean(const Sample& s, const Generator& g) {
  detail::check_domain(s.values(), g);
  return detail::quasi_mean_of(detail::sorted_support(s.values(), {}), g);
}

/// Weighted quasi-arithmetic mean f^-1(sum q_i f(x_i)).
///
/// Zero-weight values must still lie in the generator's domain but do not
/// contribute to the result or its bounds.
inline double weighted_quasi_mean(const Sample& s, const WeightVector& w, const Generator& g) {
  if (w.size() != s.size()) throw LengthMismatch(s.size(), w.size());
  detail::check_domain(s.values(), g);
  return detail::quasi_mean_of(detail::sorted_support(s.values(), w.weights()), g);
}

/// Middle order statistic; even lengths average the two central values.
inline double median(const Sample& s) {
  std::vector<double> v(s.begin(), s.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  const double sum = lower + upper;
  return std::isfinite(sum) ? sum / 2.0 : lower / 2.0 + upper / 2.0;
}

/// A parsed mean name: either a generator-backed quasi-mean or the median.
class MeanSpec {
 public:
  /// Accepts arithmetic, quadratic, geometric, harmonic, exponential,
  /// power:<alpha>, median, and the generator names.
  static MeanSpec parse(std::string_view name) {
    if (name == "median") return MeanSpec(std::string(name), std::nullopt);
    if (name == "arithmetic") return MeanSpec(std::string(name), Generator::identity());
    if (name == "quadratic") return MeanSpec(std::string(name), Generator::square());
    if (name == "geometric") return MeanSpec(std::string(name), Generator::log());
    if (name == "harmonic") return MeanSpec(std::string(name), Generator::reciprocal());
    if (name == "exponential") return MeanSpec(std::string(name), Generator::exp());
    return MeanSpec(std::string(name), Generator::parse(name));
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] bool is_median() const noexcept { return !generator_.has_value(); }
  [[nodiscard]] const std::optional<Generator>& generator() const noexcept { return generator_; }

  [[nodiscard]] Interval domain() const noexcept {
    return generator_ ? generator_->domain() : Interval::reals();
  }

  [[nodiscard]] double operator()(const Sample& s) const {
    return generator_ ? quasi_mean(s, *generator_) : median(s);
  }

  [[nodiscard]] double operator()(const Sample& s, const WeightVector& w) const {
    if (!generator_) throw InvalidWeights("median has no weighted form");
    return weighted_quasi_mean(s, w, *generator_);
  }

 private:
  MeanSpec(std::string name, std::optional<Generator> g)
      : name_(std::move(name)), generator_(std::move(g)) {}

  std::string name_;
  std::optional<Generator> generator_;
};

inline double named_mean(const Sample& s, std::string_view name) { return MeanSpec::parse(name)(s); }

/// Quasi-mean for an arbitrary generator pair, with no stable special-casing.
/// Values are still accumulated in ascending order.
template <class Forward, class Inverse>
double quasi_mean_with(const Sample& s, Forward&& f, Inverse&& f_inv) {
  const auto points = detail::sorted_support(s.values(), {});
  return f_inv(detail::weighted_average(points, f));
}

}  // namespace quasimean
