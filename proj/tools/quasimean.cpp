// Command-line front end: mean, chisini and audit subcommands.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quasimean/cli/dataset.hpp"
#include "quasimean/cli/report.hpp"

namespace qm = quasimean;
namespace qc = quasimean::cli;

namespace {

struct Input {
  std::string path;
  std::string format;  // empty: by extension
  std::string label;
  bool require_weights = false;
};

qc::Dataset load(const Input& in) {
  const qc::InputFormat fmt = in.format.empty() ? qc::format_for_path(in.path)
                              : in.format == "jsonl"  ? qc::InputFormat::json_lines
                                                      : qc::InputFormat::csv;
  qc::Dataset d;
  if (in.path == "-") {
    d = qc::parse_dataset(std::cin, fmt, "-");
  } else {
    std::ifstream file(in.path);
    if (!file) throw qm::ParseError(0, "cannot open '" + in.path + "'");
    d = qc::parse_dataset(file, fmt, in.path);
  }
  if (!in.label.empty()) d.label = in.label;
  if (in.require_weights && !d.weighted()) throw qm::MixedWeightError("--weights given but the data has no weights");
  return d;
}

void add_input(CLI::App* cmd, Input& in, std::string& output) {
  cmd->add_option("file", in.path, "Data file, or - for standard input")->required();
  cmd->add_option("--format", in.format, "Input format (default: by extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--label", in.label, "Dataset label for the report");
  cmd->add_option("--output", output, "Output format")->check(CLI::IsMember({"structured", "table"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-arithmetic means, Chisini's equation and mean-axiom audits"};
  app.require_subcommand(1);

  qc::RunConfig cfg;
  Input input;
  std::string output = "structured";
  std::string target;
  std::vector<std::string> tolerance_args;

  auto* mean = app.add_subcommand("mean", "Compute quasi-arithmetic means of a dataset");
  mean->add_option("--means", cfg.means, "Comma-separated mean names")->required()->delimiter(',');
  mean->add_flag("--weights", input.require_weights, "Require a weight column");
  mean->add_flag("--renormalize-weights", cfg.renormalize_weights, "Rescale weights to sum to 1");
  add_input(mean, input, output);

  auto* chisini = app.add_subcommand("chisini", "Solve Chisini's equation for a built-in aggregate");
  chisini->add_option("--aggregate", cfg.aggregate, "sum, product, sum-squares, sum-inverses or sum-exp")
      ->required();
  add_input(chisini, input, output);

  auto* audit = app.add_subcommand("audit", "Audit a mean against the Kolmogorov-Nagumo axioms");
  audit->add_option("--target", target, "Mean name or median")->required();
  audit->add_option("--trials", cfg.trials, "Randomized trials per axiom")->check(CLI::PositiveNumber);
  audit->add_option("--seed", cfg.seed, "Random seed")->envname("QUASIMEAN_SEED");
  audit->add_flag("--strict", cfg.strict, "Exit with status 4 when any axiom fails");
  audit->add_option("--tolerance", tolerance_args, "Override a tolerance, name=value");
  audit->add_option("--output", output, "Output format")->check(CLI::IsMember({"structured", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qc::kSuccess : qc::kUsage;
  }
  cfg.output = output == "table" ? qc::OutputFormat::table : qc::OutputFormat::structured;

  try {
    for (const auto& arg : tolerance_args) {
      const auto eq = arg.find('=');
      if (eq == std::string::npos) throw qm::error("--tolerance expects name=value");
      cfg.tolerances[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
    }

    qc::RunOutput result;
    if (*mean) {
      result = qc::run_means(load(input), cfg);
    } else if (*chisini) {
      result = qc::run_chisini(load(input), cfg);
    } else {
      result = qc::run_audit(target, cfg);
    }
    if (cfg.output == qc::OutputFormat::table) {
      std::cout << qc::render_table(result.document);
    } else {
      std::cout << result.document.dump(2) << '\n';
    }
    return result.exit_code;
  } catch (const qm::UnknownMeanName& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::kUsage;
  } catch (const qm::UnknownAggregate& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::kUsage;
  } catch (const qm::UnknownAggregator& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::kUsage;
  } catch (const qm::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qc::kUsage;
  }
}
