#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>

#include "quasimean/errors.hpp"

namespace quasimean {

/// Real interval with independently open or closed ends. Infinite ends are always open.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;

  static constexpr Interval reals() noexcept { return {}; }
  static constexpr Interval positive() noexcept {
    return {0.0, std::numeric_limits<double>::infinity(), true, true};
  }
  static constexpr Interval nonnegative() noexcept {
    return {0.0, std::numeric_limits<double>::infinity(), false, true};
  }

  [[nodiscard]] constexpr bool contains(double x) const noexcept {
    if (std::isnan(x)) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }

  [[nodiscard]] constexpr bool bounded_below_by_zero() const noexcept { return lo >= 0.0; }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

enum class GeneratorKind { identity, square, log, reciprocal, power, exp };

/// A continuous strictly monotone function f with closed-form inverse.
///
/// Domains:
///   identity, exp          all reals
///   square                 [0, inf)
///   power(a), a a positive integer
///                          [0, inf)
///   log, reciprocal, power(a) otherwise
///                          (0, inf)
///
/// Every generator is increasing on its domain except reciprocal and power(a < 0).
class Generator {
 public:
  static Generator identity() noexcept { return Generator(GeneratorKind::identity, 1.0); }
  static Generator square() noexcept { return Generator(GeneratorKind::square, 2.0); }
  static Generator log() noexcept { return Generator(GeneratorKind::log, 0.0); }
  static Generator reciprocal() noexcept { return Generator(GeneratorKind::reciprocal, -1.0); }
  static Generator exp() noexcept { return Generator(GeneratorKind::exp, 0.0); }

  static Generator power(double alpha) {
    if (!std::isfinite(alpha) || alpha == 0.0) {
      throw DomainError("power generator exponent must be finite and nonzero", alpha);
    }
    return Generator(GeneratorKind::power, alpha);
  }

  /// Parses "identity", "square", "log", "reciprocal", "exp" or "power:<alpha>".
  static Generator parse(std::string_view name) {
    if (name == "identity") return identity();
    if (name == "square") return square();
    if (name == "log") return log();
    if (name == "reciprocal") return reciprocal();
    if (name == "exp") return exp();
    if (name.starts_with("power:")) return power(parse_exponent(name, name.substr(6)));
    throw UnknownMeanName(std::string(name));
  }

  [[nodiscard]] GeneratorKind kind() const noexcept { return kind_; }

  /// Exponent of power generators; meaningless for the other kinds.
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  [[nodiscard]] bool increasing() const noexcept {
    return !(kind_ == GeneratorKind::reciprocal || (kind_ == GeneratorKind::power && alpha_ < 0));
  }

  [[nodiscard]] Interval domain() const noexcept {
    switch (kind_) {
      case GeneratorKind::identity:
      case GeneratorKind::exp:
        return Interval::reals();
      case GeneratorKind::square:
        return Interval::nonnegative();
      case GeneratorKind::power:
        return positive_integer_alpha() ? Interval::nonnegative() : Interval::positive();
      case GeneratorKind::log:
      case GeneratorKind::reciprocal:
        return Interval::positive();
    }
    return Interval::reals();
  }

  /// Image of domain() under forward().
  [[nodiscard]] Interval image() const noexcept {
    switch (kind_) {
      case GeneratorKind::identity:
      case GeneratorKind::log:
        return Interval::reals();
      case GeneratorKind::square:
        return Interval::nonnegative();
      case GeneratorKind::power:
        return positive_integer_alpha() ? Interval::nonnegative() : Interval::positive();
      case GeneratorKind::reciprocal:
      case GeneratorKind::exp:
        return Interval::positive();
    }
    return Interval::reals();
  }

  [[nodiscard]] double forward(double x) const {
    if (!domain().contains(x)) throw DomainError(name() + ": argument outside domain", x);
    double y = 0.0;
    switch (kind_) {
      case GeneratorKind::identity: y = x; break;
      case GeneratorKind::square: y = x * x; break;
      case GeneratorKind::log: y = std::log(x); break;
      case GeneratorKind::reciprocal: y = 1.0 / x; break;
      case GeneratorKind::exp: y = std::exp(x); break;
      case GeneratorKind::power: y = std::pow(x, alpha_); break;
    }
    if (!std::isfinite(y)) throw OverflowError(name() + ": forward value not representable");
    return y;
  }

  [[nodiscard]] double inverse(double y) const {
    if (!image().contains(y)) throw DomainError(name() + ": argument outside image", y);
    switch (kind_) {
      case GeneratorKind::identity: return y;
      case GeneratorKind::square: return std::sqrt(y);
      case GeneratorKind::log: return finite_or_throw(std::exp(y));
      case GeneratorKind::reciprocal: return finite_or_throw(1.0 / y);
      case GeneratorKind::exp: return std::log(y);
      case GeneratorKind::power:
        if (alpha_ == 2.0) return std::sqrt(y);
        if (alpha_ == 3.0) return std::cbrt(y);
        if (alpha_ == -1.0) return finite_or_throw(1.0 / y);
        return finite_or_throw(std::pow(y, 1.0 / alpha_));
    }
    return y;
  }

  /// Lowercase configuration name, e.g. "power:0.5".
  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case GeneratorKind::identity: return "identity";
      case GeneratorKind::square: return "square";
      case GeneratorKind::log: return "log";
      case GeneratorKind::reciprocal: return "reciprocal";
      case GeneratorKind::exp: return "exp";
      case GeneratorKind::power: return "power:" + format_exponent(alpha_);
    }
    return {};
  }

  friend bool operator==(const Generator&, const Generator&) = default;

  // Shared with the mean-name parser.
  static double parse_exponent(std::string_view whole, std::string_view text) {
    double alpha = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, alpha);
    if (text.empty() || ec != std::errc{} || ptr != end) throw UnknownMeanName(std::string(whole));
    return alpha;
  }

  static std::string format_exponent(double alpha) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, alpha);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
  }

 private:
  Generator(GeneratorKind kind, double alpha) noexcept : kind_(kind), alpha_(alpha) {}

  [[nodiscard]] bool positive_integer_alpha() const noexcept {
    return alpha_ > 0 && std::trunc(alpha_) == alpha_;
  }

  [[nodiscard]] double finite_or_throw(double x) const {
    if (!std::isfinite(x)) throw OverflowError(name() + ": inverse value not representable");
    return x;
  }

  GeneratorKind kind_;
  double alpha_;
};

}  // namespace quasimean
