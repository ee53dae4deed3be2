#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quasimean/axioms.hpp"
#include "quasimean/chisini.hpp"
#include "quasimean/cli/dataset.hpp"
#include "quasimean/errors.hpp"
#include "quasimean/means.hpp"

namespace quasimean::cli {

using nlohmann::json;

enum class OutputFormat { table, structured };

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kNoChisiniRoot = 3,
  kAuditFailure = 4,
};

struct RunConfig {
  std::vector<std::string> means;
  std::optional<std::string> aggregate;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // audit tolerance overrides by name
  bool renormalize_weights = false;
  bool strict = false;
  OutputFormat output = OutputFormat::structured;
};

/// A structured document plus the exit code the tool should return.
struct RunOutput {
  json document;
  int exit_code = kSuccess;
};

/// Applies overrides named reflexivity, symmetry, monotonicity, lipschitz,
/// associativity or internality.
inline AuditOptions audit_options(const RunConfig& cfg) {
  AuditOptions opt;
  for (const auto& [name, value] : cfg.tolerances) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw error("tolerance override '" + name + "' must be positive");
    }
    if (name == "reflexivity") opt.reflexivity_tol = value;
    else if (name == "symmetry") opt.symmetry_tol = value;
    else if (name == "monotonicity") opt.monotonicity_tol = value;
    else if (name == "lipschitz") opt.lipschitz = value;
    else if (name == "associativity") opt.associativity_tol = value;
    else if (name == "internality") opt.internality_tol = value;
    else throw error("unknown tolerance override '" + name + "'");
  }
  return opt;
}

inline json config_echo(const std::string& command, const RunConfig& cfg) {
  json c = {{"command", command}};
  if (command == "mean") {
    c["means"] = cfg.means;
    c["renormalize_weights"] = cfg.renormalize_weights;
  } else if (command == "chisini") {
    c["aggregate"] = cfg.aggregate ? json(*cfg.aggregate) : json(nullptr);
  } else {
    c["trials"] = cfg.trials;
    c["seed"] = cfg.seed;
    c["strict"] = cfg.strict;
  }
  json tol = json::object();
  for (const auto& [k, v] : cfg.tolerances) tol[k] = v;
  c["tolerances"] = tol;
  return c;
}

inline json label_of(const Dataset& d) { return d.label ? json(*d.label) : json(d.source); }

/// One record {name, value, internal} per requested mean. The weighted form
/// is used exactly when the dataset carries weights.
inline RunOutput run_means(const Dataset& d, const RunConfig& cfg) {
  const Sample s = d.sample();
  std::optional<WeightVector> w;
  if (d.weighted()) {
    w = cfg.renormalize_weights ? WeightVector::renormalized(d.weights()) : WeightVector(d.weights());
  }
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double slack = 1e-9 * std::max(1.0, std::fabs(*hi));

  json results = json::array();
  for (const auto& name : cfg.means) {
    const MeanSpec spec = MeanSpec::parse(name);
    double value = 0.0;
    try {
      value = w ? spec(s, *w) : spec(s);
    } catch (const DomainError& e) {
      throw DomainError("mean '" + name + "' cannot be applied to the data", e.offending_value());
    }
    results.push_back({{"name", name},
                       {"value", value},
                       {"internal", value >= *lo - slack && value <= *hi + slack}});
  }
  return {{{"dataset", label_of(d)}, {"results", results}, {"config", config_echo("mean", cfg)}}, kSuccess};
}

inline RunOutput run_chisini(const Dataset& d, const RunConfig& cfg) {
  if (!cfg.aggregate) throw error("chisini needs an aggregate name");
  const Sample s = d.sample();
  const AggregateSpec m = AggregateSpec::parse(*cfg.aggregate, s.size());
  const ChisiniSolution sol = chisini_solve(m, s);

  json roots = json::array();
  for (std::size_t i = 0; i < sol.roots.size(); ++i) {
    roots.push_back({{"value", sol.roots[i]},
                     {"internal", static_cast<bool>(sol.internal[i])},
                     {"residual", sol.residuals[i]}});
  }
  json result = {{"aggregate", m.name()},
                 {"target", sol.target},
                 {"status", to_string(sol.status)},
                 {"roots", roots}};
  return {{{"dataset", label_of(d)}, {"results", json::array({result})}, {"config", config_echo("chisini", cfg)}},
          sol.status == ChisiniStatus::none ? kNoChisiniRoot : kSuccess};
}

inline json witness_json(const Witness& w) {
  json j = {{"sample", w.sample}};
  if (!w.alt_sample.empty()) j["alt_sample"] = w.alt_sample;
  j["k"] = w.k ? json(*w.k) : json(nullptr);
  if (w.coordinate) j["coordinate"] = *w.coordinate;
  if (w.step) j["step"] = *w.step;
  if (w.prefix_value) j["prefix_value"] = *w.prefix_value;
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  j["delta"] = w.delta;
  return j;
}

inline json axiom_json(const AxiomResult& r) {
  json j = {{"axiom", to_string(r.axiom)},
            {"verdict", to_string(r.verdict)},
            {"trials", r.trials},
            {"skipped", r.skipped},
            {"witness", r.witness ? witness_json(*r.witness) : json(nullptr)}};
  if (r.strict) j["strict"] = *r.strict;
  if (r.verdict == Verdict::error) j["message"] = r.message;
  return j;
}

/// Full audit of a built-in mean or "median". The median report also carries
/// the exhaustive counterexample over lengths up to 5 and grid {1,2,3,4,100}.
inline RunOutput run_audit(const std::string& target, const RunConfig& cfg) {
  const AggregatorRef a = AggregatorRef::named(target);
  const AxiomReport report = full_audit(a, cfg.trials, cfg.seed, audit_options(cfg));

  json results = json::array();
  for (const auto& r : report.results) results.push_back(axiom_json(r));
  json doc = {{"dataset", nullptr}, {"aggregator", target}, {"results", results}};
  if (target == "median") {
    const double grid[] = {1, 2, 3, 4, 100};
    doc["counterexample"] = witness_json(find_median_counterexample(5, grid));
  }
  doc["config"] = config_echo("audit", cfg);
  return {doc, cfg.strict && !report.all_pass() ? kAuditFailure : kSuccess};
}

/// Human-oriented rendering; not a stable format.
inline std::string render_table(const json& doc) {
  std::ostringstream out;
  out.precision(17);
  const auto num = [](const json& v) {
    std::ostringstream s;
    s.precision(12);
    if (v.is_number()) s << v.get<double>(); else s << v.dump();
    return s.str();
  };
  const std::string command = doc["config"]["command"];
  if (command == "mean") {
    for (const auto& r : doc["results"]) {
      out << r["name"].get<std::string>() << '\t' << num(r["value"])
          << (r["internal"].get<bool>() ? "" : "\t(not internal)") << '\n';
    }
  } else if (command == "chisini") {
    for (const auto& r : doc["results"]) {
      out << r["aggregate"].get<std::string>() << "\tstatus " << r["status"].get<std::string>()
          << "\ttarget " << num(r["target"]) << '\n';
      for (const auto& root : r["roots"]) {
        out << "  mu = " << num(root["value"]) << (root["internal"].get<bool>() ? "  internal" : "  external")
            << "  residual " << num(root["residual"]) << '\n';
      }
    }
  } else {
    out << "aggregator " << doc["aggregator"].get<std::string>() << '\n';
    for (const auto& r : doc["results"]) {
      out << "  " << r["axiom"].get<std::string>() << '\t' << r["verdict"].get<std::string>();
      if (r["skipped"].get<std::size_t>() > 0) out << "\t(" << r["skipped"].get<std::size_t>() << " skipped)";
      if (!r["witness"].is_null()) out << "\twitness " << r["witness"].dump();
      out << '\n';
    }
    if (doc.contains("counterexample")) out << "counterexample " << doc["counterexample"].dump() << '\n';
  }
  return out.str();
}

}  // namespace quasimean::cli
