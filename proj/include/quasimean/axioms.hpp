#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quasimean/detail/random.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/means.hpp"
#include "quasimean/sample.hpp"

namespace quasimean {

enum class Axiom { reflexivity, symmetry, monotonicity, continuity_spot, associativity, internality };

inline constexpr std::array<Axiom, 6> kAllAxioms = {
    Axiom::reflexivity,     Axiom::symmetry,      Axiom::monotonicity,
    Axiom::continuity_spot, Axiom::associativity, Axiom::internality};

inline std::string to_string(Axiom a) {
  switch (a) {
    case Axiom::reflexivity: return "reflexivity";
    case Axiom::symmetry: return "symmetry";
    case Axiom::monotonicity: return "monotonicity";
    case Axiom::continuity_spot: return "continuity-spot";
    case Axiom::associativity: return "associativity";
    case Axiom::internality: return "internality";
  }
  return {};
}

enum class Verdict { pass, fail, error };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::error: return "error";
  }
  return {};
}

/// Concrete input demonstrating a violation.
///
/// lhs is the aggregator on `sample`. rhs is, per axiom: the constant
/// (reflexivity), the aggregator on `alt_sample` (symmetry, monotonicity,
/// continuity, associativity), or the violated bound (internality).
struct Witness {
  std::vector<double> sample{};
  std::vector<double> alt_sample{};
  std::optional<std::size_t> k{};
  std::optional<std::size_t> coordinate{};
  std::optional<double> step{};
  std::optional<double> prefix_value{};
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;
};

struct AxiomResult {
  Axiom axiom = Axiom::reflexivity;
  Verdict verdict = Verdict::pass;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::optional<Witness> witness;
  std::string message;          // set for Verdict::error
  std::optional<bool> strict;   // monotonicity only: every trial strictly increased
};

/// Sampling ranges and tolerances of the audit.
struct AuditOptions {
  std::size_t max_length = 16;
  double positive_lo = 1e-3;
  double positive_hi = 1e3;
  double real_lo = -1e3;
  double real_hi = 1e3;

  double reflexivity_tol = 1e-9;
  double symmetry_tol = 1e-12;
  double monotonicity_step = 1e-3;
  double monotonicity_floor = 1e-6;
  double monotonicity_tol = 1e-12;
  double lipschitz = 1e6;
  std::array<double, 2> continuity_steps = {1e-4, 1e-6};
  std::size_t associativity_min_length = 3;
  std::size_t associativity_max_length = 10;
  double associativity_tol = 1e-9;
  double internality_tol = 1e-9;
};

/// An aggregator under audit: a deterministic map from samples of any length
/// to a real, together with the domain its inputs are drawn from.
class AggregatorRef {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  /// A mean name accepted by MeanSpec::parse, including "median".
  static AggregatorRef named(std::string_view name) {
    std::optional<MeanSpec> spec;
    try {
      spec = MeanSpec::parse(name);
    } catch (const UnknownMeanName&) {
      throw UnknownAggregator(std::string(name));
    }
    const Interval dom = spec->domain();
    return AggregatorRef(std::string(name),
                         [spec = *spec](std::span<const double> xs) { return spec(Sample(xs)); },
                         dom);
  }

  static AggregatorRef custom(std::string name, Evaluator fn, Interval domain = Interval::reals()) {
    return AggregatorRef(std::move(name), std::move(fn), domain);
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const Interval& domain() const noexcept { return domain_; }

  double operator()(std::span<const double> xs) const {
    const double v = fn_(xs);
    if (!std::isfinite(v)) throw EvaluatorFailure(name_ + " returned a non-finite value");
    return v;
  }

 private:
  AggregatorRef(std::string name, Evaluator fn, Interval domain)
      : name_(std::move(name)), fn_(std::move(fn)), domain_(domain) {}

  std::string name_;
  Evaluator fn_;
  Interval domain_;
};

namespace detail {

class TrialSampler {
 public:
  TrialSampler(const AggregatorRef& a, const AuditOptions& opt, std::uint64_t seed, Axiom axiom)
      : rng_(seed, static_cast<std::uint64_t>(axiom)), opt_(opt), dom_(a.domain()) {}

  Rng& rng() noexcept { return rng_; }

  // Log-uniform on domains bounded below by zero, uniform otherwise.
  double value() {
    if (dom_.bounded_below_by_zero()) {
      return rng_.log_uniform(std::max(opt_.positive_lo, std::nextafter(dom_.lo, 1.0)),
                              std::min(opt_.positive_hi, dom_.hi));
    }
    return rng_.uniform(std::max(opt_.real_lo, dom_.lo), std::min(opt_.real_hi, dom_.hi));
  }

  std::vector<double> sample(std::size_t min_len, std::size_t max_len) {
    std::vector<double> xs(rng_.index(min_len, max_len));
    for (double& x : xs) x = value();
    return xs;
  }

 private:
  Rng rng_;
  const AuditOptions& opt_;
  Interval dom_;
};

inline void require_trials(std::size_t trials) {
  if (trials == 0) throw error("audit needs at least one trial");
}

inline AxiomResult make_result(Axiom axiom, std::size_t trials) {
  AxiomResult r;
  r.axiom = axiom;
  r.trials = trials;
  return r;
}

inline void fail(AxiomResult& r, Witness w) {
  w.delta = w.lhs - w.rhs;
  r.verdict = Verdict::fail;
  r.witness = std::move(w);
}

inline bool reflexivity_violated(double value, double c, const AuditOptions& o) {
  return std::fabs(value - c) > o.reflexivity_tol * std::max(1.0, std::fabs(c));
}

inline bool symmetry_violated(double a, double b, const AuditOptions& o) {
  return std::fabs(a - b) > o.symmetry_tol * std::max(std::fabs(a), std::fabs(b));
}

inline bool monotonicity_violated(double before, double after, const AuditOptions& o) {
  return after < before - o.monotonicity_tol * std::max(1.0, std::fabs(before));
}

inline bool continuity_violated(double a, double b, double h, const AuditOptions& o) {
  return std::fabs(b - a) > o.lipschitz * h;
}

inline bool associativity_violated(double a, double b, const AuditOptions& o) {
  return std::fabs(a - b) > o.associativity_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline double internality_slack(std::span<const double> xs, const AuditOptions& o) {
  return o.internality_tol * std::max(1.0, std::fabs(*std::max_element(xs.begin(), xs.end())));
}

}  // namespace detail

/// Random constants c and lengths n in 1..max_length; a(c, ..., c) must equal c
/// within reflexivity_tol * max(1, |c|).
inline AxiomResult check_reflexivity(const AggregatorRef& a, std::size_t trials, std::uint64_t seed,
                                     const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::reflexivity);
  auto r = detail::make_result(Axiom::reflexivity, trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const double c = draw.value();
    const std::vector<double> xs(draw.rng().index(1, opt.max_length), c);
    const double v = a(xs);
    if (detail::reflexivity_violated(v, c, opt)) {
      detail::fail(r, {.sample = xs, .lhs = v, .rhs = c});
      break;
    }
  }
  return r;
}

/// Random samples against a random permutation of themselves.
inline AxiomResult check_symmetry(const AggregatorRef& a, std::size_t trials, std::uint64_t seed,
                                  const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::symmetry);
  auto r = detail::make_result(Axiom::symmetry, trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto xs = draw.sample(2, std::max<std::size_t>(2, opt.max_length));
    auto perm = xs;
    draw.rng().shuffle(perm);
    const double lhs = a(xs);
    const double rhs = a(perm);
    if (detail::symmetry_violated(lhs, rhs, opt)) {
      detail::fail(r, {.sample = xs, .alt_sample = perm, .lhs = lhs, .rhs = rhs});
      break;
    }
  }
  return r;
}

/// Raises one coordinate by monotonicity_step * |x_i| (at least
/// monotonicity_floor). The verdict uses the non-strict form; `strict` on the
/// result records whether every trial strictly increased.
inline AxiomResult check_monotonicity(const AggregatorRef& a, std::size_t trials,
                                      std::uint64_t seed, const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::monotonicity);
  auto r = detail::make_result(Axiom::monotonicity, trials);
  bool strict = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto xs = draw.sample(1, opt.max_length);
    const std::size_t i = draw.rng().index(0, xs.size() - 1);
    auto bumped = xs;
    bumped[i] += std::max(opt.monotonicity_step * std::fabs(xs[i]), opt.monotonicity_floor);
    if (!a.domain().contains(bumped[i])) {
      ++r.skipped;
      continue;
    }
    const double before = a(xs);
    const double after = a(bumped);
    if (!(after > before)) strict = false;
    if (detail::monotonicity_violated(before, after, opt)) {
      detail::fail(r, {.sample = xs, .alt_sample = bumped, .coordinate = i, .lhs = before, .rhs = after});
      break;
    }
  }
  r.strict = strict && r.verdict == Verdict::pass;
  return r;
}

/// Lipschitz spot check |a(x + h e_i) - a(x)| <= L h for each step h. Half
/// of the probes straddle a landmark (zero, or the nearest integer to x_i),
/// where step discontinuities tend to sit. A pass is not a continuity proof.
inline AxiomResult check_continuity_spot(const AggregatorRef& a, std::size_t trials,
                                         std::uint64_t seed, const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::continuity_spot);
  auto r = detail::make_result(Axiom::continuity_spot, trials);
  const Interval& dom = a.domain();
  for (std::size_t t = 0; t < trials && r.verdict == Verdict::pass; ++t) {
    const auto xs = draw.sample(1, opt.max_length);
    const std::size_t i = draw.rng().index(0, xs.size() - 1);
    const bool straddle = draw.rng().coin();
    const bool at_zero = draw.rng().coin();
    for (double h : opt.continuity_steps) {
      auto base = xs;
      if (straddle) {
        const double landmark = (at_zero && dom.contains(-h) && dom.contains(h)) ? 0.0 : std::round(xs[i]);
        const double start = landmark - h / 2.0;
        if (dom.contains(start) && dom.contains(start + h)) base[i] = start;
      }
      auto moved = base;
      moved[i] += h;
      if (!dom.contains(moved[i])) {
        ++r.skipped;
        continue;
      }
      const double lhs = a(base);
      const double rhs = a(moved);
      if (detail::continuity_violated(lhs, rhs, h, opt)) {
        detail::fail(r, {.sample = base, .alt_sample = moved, .coordinate = i, .step = h, .lhs = lhs, .rhs = rhs});
        break;
      }
    }
  }
  return r;
}

/// Replaces a random prefix of length k by k copies of its own aggregate and
/// compares. Trials whose replacement value leaves the domain are skipped.
inline AxiomResult check_associativity(const AggregatorRef& a, std::size_t trials,
                                       std::uint64_t seed, const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::associativity);
  auto r = detail::make_result(Axiom::associativity, trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto xs = draw.sample(opt.associativity_min_length, opt.associativity_max_length);
    const std::size_t k = draw.rng().index(1, xs.size() - 1);
    const double prefix = a(std::span<const double>(xs).first(k));
    if (!a.domain().contains(prefix)) {
      ++r.skipped;
      continue;
    }
    auto replaced = xs;
    std::fill_n(replaced.begin(), k, prefix);
    double rhs = 0.0;
    try {
      rhs = a(replaced);
    } catch (const DomainError&) {
      ++r.skipped;
      continue;
    }
    const double lhs = a(xs);
    if (detail::associativity_violated(lhs, rhs, opt)) {
      detail::fail(r, {.sample = xs, .alt_sample = replaced, .k = k, .prefix_value = prefix, .lhs = lhs, .rhs = rhs});
      break;
    }
  }
  return r;
}

/// min(s) - tol <= a(s) <= max(s) + tol with tol = internality_tol * max(1, |max(s)|).
inline AxiomResult check_internality(const AggregatorRef& a, std::size_t trials, std::uint64_t seed,
                                     const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  detail::TrialSampler draw(a, opt, seed, Axiom::internality);
  auto r = detail::make_result(Axiom::internality, trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto xs = draw.sample(1, opt.max_length);
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const double slack = detail::internality_slack(xs, opt);
    const double v = a(xs);
    if (v < *lo - slack || v > *hi + slack) {
      detail::fail(r, {.sample = xs, .lhs = v, .rhs = v < *lo ? *lo : *hi});
      break;
    }
  }
  return r;
}

inline AxiomResult check_axiom(Axiom axiom, const AggregatorRef& a, std::size_t trials,
                               std::uint64_t seed, const AuditOptions& opt = {}) {
  switch (axiom) {
    case Axiom::reflexivity: return check_reflexivity(a, trials, seed, opt);
    case Axiom::symmetry: return check_symmetry(a, trials, seed, opt);
    case Axiom::monotonicity: return check_monotonicity(a, trials, seed, opt);
    case Axiom::continuity_spot: return check_continuity_spot(a, trials, seed, opt);
    case Axiom::associativity: return check_associativity(a, trials, seed, opt);
    case Axiom::internality: return check_internality(a, trials, seed, opt);
  }
  return {};
}

/// Re-evaluates a failure witness; true when it still violates its axiom.
inline bool witness_reproduces(const AggregatorRef& a, Axiom axiom, const Witness& w,
                               const AuditOptions& opt = {}) {
  const double lhs = a(w.sample);
  switch (axiom) {
    case Axiom::reflexivity:
      return detail::reflexivity_violated(lhs, w.sample.front(), opt);
    case Axiom::symmetry:
      return detail::symmetry_violated(lhs, a(w.alt_sample), opt);
    case Axiom::monotonicity:
      return detail::monotonicity_violated(lhs, a(w.alt_sample), opt);
    case Axiom::continuity_spot:
      return w.step && detail::continuity_violated(lhs, a(w.alt_sample), *w.step, opt);
    case Axiom::associativity: {
      if (!w.k || !w.prefix_value) return false;
      const double prefix = a(std::span<const double>(w.sample).first(*w.k));
      if (prefix != *w.prefix_value) return false;
      return detail::associativity_violated(lhs, a(w.alt_sample), opt);
    }
    case Axiom::internality: {
      const auto [lo, hi] = std::minmax_element(w.sample.begin(), w.sample.end());
      const double slack = detail::internality_slack(w.sample, opt);
      return lhs < *lo - slack || lhs > *hi + slack;
    }
  }
  return false;
}

struct AxiomReport {
  std::string aggregator;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<AxiomResult> results;  // in kAllAxioms order

  [[nodiscard]] const AxiomResult& at(Axiom axiom) const {
    return results.at(static_cast<std::size_t>(axiom));
  }

  [[nodiscard]] Verdict verdict(Axiom axiom) const { return at(axiom).verdict; }

  [[nodiscard]] bool all_pass() const {
    return std::all_of(results.begin(), results.end(),
                       [](const AxiomResult& r) { return r.verdict == Verdict::pass; });
  }

  [[nodiscard]] std::vector<Axiom> failures() const {
    std::vector<Axiom> out;
    for (const auto& r : results) {
      if (r.verdict != Verdict::pass) out.push_back(r.axiom);
    }
    return out;
  }
};

/// Runs all six checks, each on its own substream of `seed`. Errors raised by
/// a check are recorded as Verdict::error rather than aborting the audit.
inline AxiomReport full_audit(const AggregatorRef& a, std::size_t trials, std::uint64_t seed,
                              const AuditOptions& opt = {}) {
  detail::require_trials(trials);
  AxiomReport report{a.name(), seed, trials, {}};
  for (Axiom axiom : kAllAxioms) {
    try {
      report.results.push_back(check_axiom(axiom, a, trials, seed, opt));
    } catch (const std::exception& e) {
      auto r = detail::make_result(axiom, trials);
      r.verdict = Verdict::error;
      r.message = e.what();
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

/// Exhaustive search for a median associativity failure.
///
/// Samples are ordered selections of distinct grid entries (no entry used
/// twice). Lengths are tried from max_n down to 3; within a length, samples
/// in lexicographic order and then k ascending. The first failing
/// (sample, k) is returned.
inline Witness find_median_counterexample(std::size_t max_n, std::span<const double> value_grid) {
  if (max_n < 3) throw error("median counterexample search needs max_n >= 3");
  std::vector<double> grid(value_grid.begin(), value_grid.end());
  for (double v : grid) {
    if (!std::isfinite(v)) throw InvalidSample("value grid must be finite");
  }
  std::sort(grid.begin(), grid.end());

  const auto med = [](std::span<const double> xs) { return median(Sample(xs)); };
  const AuditOptions opt;
  std::optional<Witness> found;
  std::vector<double> current;
  std::vector<bool> used(grid.size(), false);

  const auto test = [&](const std::vector<double>& xs) {
    const double lhs = med(xs);
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double prefix = med(std::span<const double>(xs).first(k));
      auto replaced = xs;
      std::fill_n(replaced.begin(), k, prefix);
      const double rhs = med(replaced);
      if (detail::associativity_violated(lhs, rhs, opt)) {
        found = Witness{.sample = xs, .alt_sample = replaced, .k = k, .prefix_value = prefix,
                        .lhs = lhs, .rhs = rhs, .delta = lhs - rhs};
        return;
      }
    }
  };

  const std::function<void(std::size_t)> extend = [&](std::size_t n) {
    if (found) return;
    if (current.size() == n) {
      test(current);
      return;
    }
    for (std::size_t j = 0; j < grid.size() && !found; ++j) {
      if (used[j]) continue;
      // Equal values at the same depth give the same sequences.
      if (j > 0 && grid[j] == grid[j - 1] && !used[j - 1]) continue;
      used[j] = true;
      current.push_back(grid[j]);
      extend(n);
      current.pop_back();
      used[j] = false;
    }
  };

  for (std::size_t n = std::min(max_n, grid.size()); n >= 3 && !found; --n) extend(n);
  if (!found) throw NoWitnessFound("no median associativity violation in the search space");
  return *found;
}

}  // namespace quasimean
