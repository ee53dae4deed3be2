#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quasimean/detail/summation.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/sample.hpp"

namespace quasimean {

enum class AggregateForm { sum, product, sum_of_squares, sum_of_inverses, sum_of_exponentials, custom };

/// Evaluator for a caller-supplied aggregate. Must be deterministic and reentrant.
using AggregateEvaluator = std::function<double(std::span<const double>)>;

/// An aggregate functional M of fixed arity.
class AggregateSpec {
 public:
  static AggregateSpec builtin(AggregateForm form, std::size_t arity) {
    if (form == AggregateForm::custom) throw UnknownAggregate("custom");
    return AggregateSpec(form, arity, {}, builtin_domain(form));
  }

  /// Custom aggregates may restrict the search domain of the diagonal map.
  static AggregateSpec custom(AggregateEvaluator evaluator, std::size_t arity,
                              Interval domain = Interval::reals()) {
    if (!evaluator) throw EvaluatorFailure("custom aggregate needs an evaluator");
    return AggregateSpec(AggregateForm::custom, arity, std::move(evaluator), domain);
  }

  /// "sum", "product", "sum-squares", "sum-inverses" or "sum-exp".
  static AggregateSpec parse(std::string_view name, std::size_t arity) {
    return builtin(parse_form(name), arity);
  }

  static AggregateForm parse_form(std::string_view name) {
    if (name == "sum") return AggregateForm::sum;
    if (name == "product") return AggregateForm::product;
    if (name == "sum-squares") return AggregateForm::sum_of_squares;
    if (name == "sum-inverses") return AggregateForm::sum_of_inverses;
    if (name == "sum-exp") return AggregateForm::sum_of_exponentials;
    throw UnknownAggregate(std::string(name));
  }

  [[nodiscard]] AggregateForm form() const noexcept { return form_; }
  [[nodiscard]] std::size_t arity() const noexcept { return arity_; }
  [[nodiscard]] const Interval& domain() const noexcept { return domain_; }

  [[nodiscard]] std::string name() const {
    switch (form_) {
      case AggregateForm::sum: return "sum";
      case AggregateForm::product: return "product";
      case AggregateForm::sum_of_squares: return "sum-squares";
      case AggregateForm::sum_of_inverses: return "sum-inverses";
      case AggregateForm::sum_of_exponentials: return "sum-exp";
      case AggregateForm::custom: return "custom";
    }
    return {};
  }

  /// M(x_1, ..., x_n). Values must lie in domain().
  [[nodiscard]] double evaluate(std::span<const double> xs) const {
    for (double x : xs) {
      if (!domain_.contains(x)) throw DomainError(name() + ": value outside aggregate domain", x);
    }
    if (form_ == AggregateForm::custom) {
      const double v = evaluator_(xs);
      if (!std::isfinite(v)) throw EvaluatorFailure("custom aggregate returned a non-finite value");
      return v;
    }
    if (form_ == AggregateForm::product) {
      double p = 1.0;
      for (double x : xs) p *= x;
      return p;
    }
    detail::CompensatedSum s;
    for (double x : xs) {
      switch (form_) {
        case AggregateForm::sum: s += x; break;
        case AggregateForm::sum_of_squares: s += x * x; break;
        case AggregateForm::sum_of_inverses: s += 1.0 / x; break;
        case AggregateForm::sum_of_exponentials: s += std::exp(x); break;
        default: break;
      }
    }
    return s.value();
  }

 private:
  AggregateSpec(AggregateForm form, std::size_t arity, AggregateEvaluator evaluator, Interval domain)
      : form_(form), arity_(arity), evaluator_(std::move(evaluator)), domain_(domain) {
    if (arity_ == 0) throw InvalidSample("aggregate arity must be at least 1");
  }

  static Interval builtin_domain(AggregateForm form) noexcept {
    switch (form) {
      case AggregateForm::product:
      case AggregateForm::sum_of_inverses:
        return Interval::positive();
      case AggregateForm::sum_of_squares:
        return Interval::nonnegative();
      default:
        return Interval::reals();
    }
  }

  AggregateForm form_;
  std::size_t arity_;
  AggregateEvaluator evaluator_;
  Interval domain_;
};

enum class ChisiniStatus { unique, multiple, none, undetermined_resolution };

inline std::string to_string(ChisiniStatus s) {
  switch (s) {
    case ChisiniStatus::unique: return "Unique";
    case ChisiniStatus::multiple: return "Multiple";
    case ChisiniStatus::none: return "None";
    case ChisiniStatus::undetermined_resolution: return "UndeterminedResolution";
  }
  return {};
}

struct ChisiniSolution {
  std::vector<double> roots;      // ascending
  ChisiniStatus status = ChisiniStatus::none;
  std::vector<bool> internal;     // per root
  std::vector<double> residuals;  // |M(mu,...,mu) - target| per root
  double target = 0.0;
  double bracket_lo = 0.0;        // widest bracket searched
  double bracket_hi = 0.0;
};

/// Settings of the scan-and-bisect search used for custom aggregates.
struct ChisiniSearch {
  std::size_t grid_points = 1024;
  int max_doublings = 20;
  int max_bisections = 200;
  double bisection_rel_tol = 1e-12;
  double residual_rel_tol = 1e-9;
  double merge_rel_tol = 1e-9;
  std::size_t oscillation_limit = 32;
};

/// M(mu, ..., mu) with n copies of mu.
inline double diagonal(const AggregateSpec& m, double mu, std::size_t n) {
  if (!m.domain().contains(mu)) throw DomainError(m.name() + ": mu outside aggregate domain", mu);
  const double dn = static_cast<double>(n);
  switch (m.form()) {
    case AggregateForm::sum: return dn * mu;
    case AggregateForm::product: return std::pow(mu, dn);
    case AggregateForm::sum_of_squares: return dn * mu * mu;
    case AggregateForm::sum_of_inverses: return dn / mu;
    case AggregateForm::sum_of_exponentials: return dn * std::exp(mu);
    case AggregateForm::custom: break;
  }
  const std::vector<double> constant(n, mu);
  return m.evaluate(constant);
}

namespace detail {

inline double internality_tolerance(double hi) { return 1e-9 * std::max(1.0, std::fabs(hi)); }

// Closed-form inverse of the diagonal map, evaluated in log space where the
// raw aggregate would overflow.
inline double closed_form_root(AggregateForm form, std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  CompensatedSum s;
  switch (form) {
    case AggregateForm::sum:
      for (double x : xs) s += x;
      return s.value() / n;
    case AggregateForm::product:
      for (double x : xs) s += std::log(x);
      return std::exp(s.value() / n);
    case AggregateForm::sum_of_squares: {
      const double scale = *std::max_element(xs.begin(), xs.end());
      if (scale == 0.0) return 0.0;
      for (double x : xs) s += (x / scale) * (x / scale);
      return scale * std::sqrt(s.value() / n);
    }
    case AggregateForm::sum_of_inverses:
      for (double x : xs) s += 1.0 / x;
      return n / s.value();
    case AggregateForm::sum_of_exponentials: {
      const double m = *std::max_element(xs.begin(), xs.end());
      for (double x : xs) s += std::exp(x - m);
      return m + std::log(s.value() / n);
    }
    case AggregateForm::custom: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline int sign(double v) noexcept { return (v > 0) - (v < 0); }

struct Candidate {
  double mu;
  double residual;
};

class DiagonalSearch {
 public:
  DiagonalSearch(const AggregateSpec& m, std::size_t n, double target, double scale,
                 const ChisiniSearch& cfg)
      : m_(m), n_(n), target_(target), scale_(scale), cfg_(cfg) {}

  double g(double mu) const { return diagonal(m_, mu, n_) - target_; }

  // Bisects [a, b] where g changes sign; returns the best point found.
  Candidate bisect(double a, double ga, double b, double gb) const {
    (void)gb;
    for (int it = 0; it < cfg_.max_bisections; ++it) {
      const double mid = a + (b - a) / 2.0;
      const double tol = cfg_.bisection_rel_tol * std::max({std::fabs(a), std::fabs(b), scale_});
      if (mid == a || mid == b || b - a <= tol) return best_of(a, b);
      const double gm = finite_g(mid);
      if (std::isnan(gm)) return {mid, std::numeric_limits<double>::infinity()};
      if (gm == 0.0) return {mid, 0.0};
      if (sign(gm) == sign(ga)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    const double tol = cfg_.bisection_rel_tol * std::max({std::fabs(a), std::fabs(b), scale_});
    if (b - a <= tol) return best_of(a, b);
    throw NonConvergence("bisection did not converge within " + std::to_string(cfg_.max_bisections) +
                         " iterations");
  }

 private:
  // NaN when the diagonal is not finite at mu, as happens at a pole.
  double finite_g(double mu) const {
    try {
      const double v = g(mu);
      return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
    } catch (const EvaluatorFailure&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

  Candidate best_of(double a, double b) const {
    Candidate best{a, std::numeric_limits<double>::infinity()};
    for (double x : {a + (b - a) / 2.0, a, b}) {
      const double r = std::fabs(finite_g(x));
      if (r < best.residual) best = {x, r};
    }
    return best;
  }

  const AggregateSpec& m_;
  std::size_t n_;
  double target_;
  double scale_;
  const ChisiniSearch& cfg_;
};

inline void finish(ChisiniSolution& sol, std::span<const double> xs) {
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double tol = internality_tolerance(*hi_it);
  sol.internal.clear();
  for (double mu : sol.roots) sol.internal.push_back(mu >= *lo_it - tol && mu <= *hi_it + tol);
}

}  // namespace detail

/// Solves M(mu, ..., mu) = M(x_1, ..., x_n) for mu.
///
/// Built-in forms use the closed-form inverse of their diagonal map. Custom
/// forms scan g(mu) = M(mu, ..., mu) - M(x) on a uniform grid over
/// [min(x), max(x)], then over brackets doubled about the same centre up to
/// 2^20 times the sample range, clipped to the aggregate's domain. Every sign
/// change is bisected; each candidate root must reproduce the target within
/// residual_rel_tol * max(1, |target|). Roots closer than merge_rel_tol times
/// the range are merged.
///
/// Roots where g touches zero without changing sign are not found. A grid
/// with oscillation_limit or more sign changes yields UndeterminedResolution
/// with no roots. A single root on a diagonal that is not strictly monotone
/// over the searched brackets is reported, but also as UndeterminedResolution.
/// Brackets beyond the first stop growing once the evaluator produces a
/// non-finite value.
inline ChisiniSolution chisini_solve(const AggregateSpec& m, const Sample& s,
                                     const ChisiniSearch& cfg = {}) {
  const auto xs = s.values();
  if (xs.size() != m.arity()) throw LengthMismatch(m.arity(), xs.size());

  ChisiniSolution sol;
  sol.target = m.evaluate(xs);
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double xmin = *lo_it;
  const double xmax = *hi_it;
  sol.bracket_lo = xmin;
  sol.bracket_hi = xmax;
  const double residual_tol = cfg.residual_rel_tol * std::max(1.0, std::fabs(sol.target));

  if (m.form() != AggregateForm::custom) {
    const double mu = detail::closed_form_root(m.form(), xs);
    if (!std::isfinite(mu)) throw OverflowError(m.name() + ": closed-form root not representable");
    sol.roots = {mu};
    sol.residuals = {std::fabs(diagonal(m, mu, xs.size()) - sol.target)};
    sol.status = ChisiniStatus::unique;
    detail::finish(sol, xs);
    return sol;
  }

  double range = xmax - xmin;
  double centre = xmin + range / 2.0;
  if (range == 0.0) range = std::max(1.0, std::fabs(xmin));
  const double scale = std::max({range, std::fabs(xmin), std::fabs(xmax)});
  const detail::DiagonalSearch search(m, xs.size(), sol.target, scale, cfg);
  const Interval& dom = m.domain();

  std::vector<detail::Candidate> found;
  int monotone_direction = 0;
  bool monotone = true;
  double prev_lo = 0.0;
  double prev_hi = 0.0;
  const std::size_t npts = std::max<std::size_t>(cfg.grid_points, 2);

  for (int level = 0; level <= cfg.max_doublings; ++level) {
    const double width = std::ldexp(range, level);
    double lo = (level == 0 && xmax > xmin) ? xmin : centre - width / 2.0;
    double hi = (level == 0 && xmax > xmin) ? xmax : centre + width / 2.0;
    if (lo < dom.lo || (dom.lo_open && lo <= dom.lo)) {
      lo = dom.lo_open ? dom.lo + std::ldexp(width, -30) : dom.lo;
    }
    if (hi > dom.hi || (dom.hi_open && hi >= dom.hi)) {
      hi = dom.hi_open ? dom.hi - std::ldexp(width, -30) : dom.hi;
    }
    if (!(lo < hi) && level > 0) break;
    if (level > 0 && lo == prev_lo && hi == prev_hi) break;

    std::vector<double> grid(npts);
    std::vector<double> gv(npts);
    bool finite = true;
    for (std::size_t j = 0; j < npts; ++j) {
      grid[j] = j + 1 == npts ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(npts - 1);
      try {
        gv[j] = search.g(grid[j]);
      } catch (const EvaluatorFailure&) {
        if (level == 0) throw;
        finite = false;
        break;
      }
      if (!std::isfinite(gv[j])) {
        if (level == 0) throw EvaluatorFailure("diagonal map is not finite inside the sample range");
        finite = false;
        break;
      }
    }
    if (!finite) break;
    prev_lo = lo;
    prev_hi = hi;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;

    std::size_t changes = 0;
    for (std::size_t j = 0; j < npts; ++j) {
      if (gv[j] == 0.0) {
        ++changes;
        found.push_back({grid[j], 0.0});
        continue;
      }
      if (j + 1 < npts && gv[j + 1] != 0.0 && detail::sign(gv[j]) != detail::sign(gv[j + 1])) ++changes;
    }
    if (changes >= cfg.oscillation_limit) {
      sol.status = ChisiniStatus::undetermined_resolution;
      return sol;
    }
    for (std::size_t j = 0; j + 1 < npts; ++j) {
      const int d = detail::sign(gv[j + 1] - gv[j]);
      if (d == 0 || (monotone_direction != 0 && d != monotone_direction)) monotone = false;
      if (d != 0 && monotone_direction == 0) monotone_direction = d;
      if (gv[j] != 0.0 && gv[j + 1] != 0.0 && detail::sign(gv[j]) != detail::sign(gv[j + 1])) {
        found.push_back(search.bisect(grid[j], gv[j], grid[j + 1], gv[j + 1]));
      }
    }
  }

  // Certify, then merge near-duplicates keeping the smaller residual.
  std::erase_if(found, [&](const detail::Candidate& c) { return !(c.residual <= residual_tol); });
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
  const double merge_gap = cfg.merge_rel_tol * range;
  std::vector<detail::Candidate> merged;
  for (const auto& c : found) {
    if (!merged.empty() && c.mu - merged.back().mu <= merge_gap) {
      if (c.residual < merged.back().residual) merged.back() = c;
    } else {
      merged.push_back(c);
    }
  }
  for (const auto& c : merged) {
    sol.roots.push_back(c.mu);
    sol.residuals.push_back(c.residual);
  }

  if (sol.roots.empty()) {
    sol.status = ChisiniStatus::none;
  } else if (sol.roots.size() >= 2) {
    sol.status = ChisiniStatus::multiple;
  } else {
    sol.status = monotone ? ChisiniStatus::unique : ChisiniStatus::undetermined_resolution;
  }
  detail::finish(sol, xs);
  return sol;
}

}  // namespace quasimean
