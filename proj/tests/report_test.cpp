#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "quasimean/cli/report.hpp"

using namespace quasimean;
using namespace quasimean::cli;

namespace {

Dataset csv(const std::string& text) { return parse_dataset(text, InputFormat::csv, "inline"); }

RunConfig means(std::vector<std::string> names) {
  RunConfig cfg;
  cfg.means = std::move(names);
  return cfg;
}

struct Process {
  int status = -1;
  std::string out;
};

Process run(const std::string& args, const std::string& env = "") {
  Process p;
  const std::string cmd = env + std::string(QUASIMEAN_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return p;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) p.out.append(buf, n);
  const int raw = pclose(pipe);
  p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return p;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST(RunMeans, Examples) {
  const auto out = run_means(csv("1\n2\n3\n"), means({"arithmetic", "quadratic"}));
  EXPECT_EQ(out.exit_code, kSuccess);
  const auto& r = out.document["results"];
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0]["name"], "arithmetic");
  EXPECT_EQ(r[0]["value"].get<double>(), 2.0);
  EXPECT_NEAR(r[1]["value"].get<double>(), std::sqrt(14.0 / 3.0), 1e-15);
  EXPECT_TRUE(r[1]["internal"].get<bool>());

  const auto geo = run_means(csv("2\n8\n"), means({"geometric"}));
  EXPECT_NEAR(geo.document["results"][0]["value"].get<double>(), 4.0, 4e-15);
  EXPECT_TRUE(geo.document["results"][0]["internal"].get<bool>());

  const auto harm = run_means(csv("4\n4\n"), means({"harmonic"}));
  EXPECT_EQ(harm.document["results"][0]["value"].get<double>(), 4.0);
  EXPECT_EQ(harm.document["dataset"], "inline");
}

TEST(RunMeans, WeightedPathAndRenormalization) {
  const auto out = run_means(csv("1,0.25\n3,0.75\n"), means({"arithmetic"}));
  EXPECT_EQ(out.document["results"][0]["value"].get<double>(), 2.5);

  EXPECT_THROW((void)run_means(csv("1,1\n3,3\n"), means({"arithmetic"})), InvalidWeights);
  auto cfg = means({"arithmetic"});
  cfg.renormalize_weights = true;
  EXPECT_EQ(run_means(csv("1,1\n3,3\n"), cfg).document["results"][0]["value"].get<double>(), 2.5);
  EXPECT_THROW((void)run_means(csv("1,0.5\n3,0.5\n"), means({"median"})), InvalidWeights);
}

TEST(RunMeans, DomainErrorNamesMeanAndValue) {
  try {
    (void)run_means(csv("1\n-2\n"), means({"arithmetic", "harmonic"}));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.offending_value(), -2.0);
    EXPECT_NE(std::string(e.what()).find("harmonic"), std::string::npos);
  }
  EXPECT_THROW((void)run_means(csv("1\n"), means({"mode"})), UnknownMeanName);
}

TEST(RunChisini, Examples) {
  RunConfig cfg;
  cfg.aggregate = "sum";
  auto r = run_chisini(csv("1\n2\n3\n"), cfg).document["results"][0];
  EXPECT_EQ(r["status"], "Unique");
  EXPECT_EQ(r["roots"][0]["value"].get<double>(), 2.0);
  EXPECT_TRUE(r["roots"][0]["internal"].get<bool>());

  cfg.aggregate = "product";
  r = run_chisini(csv("2\n8\n"), cfg).document["results"][0];
  EXPECT_NEAR(r["roots"][0]["value"].get<double>(), 4.0, 1e-14);
  EXPECT_EQ(r["status"], "Unique");

  cfg.aggregate = "sum-inverses";
  r = run_chisini(csv("1\n3\n"), cfg).document["results"][0];
  EXPECT_NEAR(r["roots"][0]["value"].get<double>(), 1.5, 1e-15);
  EXPECT_LE(r["roots"][0]["residual"].get<double>(), 1e-9);

  cfg.aggregate = "sum-cubes";
  EXPECT_THROW((void)run_chisini(csv("1\n"), cfg), UnknownAggregate);
}

TEST(RunAudit, Examples) {
  RunConfig cfg;
  cfg.trials = 200;
  const auto arith = run_audit("arithmetic", cfg).document;
  ASSERT_EQ(arith["results"].size(), 6u);
  for (const auto& r : arith["results"]) EXPECT_EQ(r["verdict"], "pass") << r["axiom"];
  EXPECT_FALSE(arith.contains("counterexample"));

  cfg.strict = true;
  const auto med = run_audit("median", cfg);
  EXPECT_EQ(med.exit_code, kAuditFailure);
  for (const auto& r : med.document["results"]) {
    EXPECT_EQ(r["verdict"], r["axiom"] == "associativity" ? "fail" : "pass");
  }
  const auto& assoc = med.document["results"][4];
  EXPECT_EQ(assoc["axiom"], "associativity");
  for (const char* key : {"sample", "k", "lhs", "rhs", "delta"}) EXPECT_TRUE(assoc["witness"].contains(key)) << key;
  EXPECT_EQ(med.document["counterexample"]["sample"], nlohmann::json({1, 2, 3, 4, 100}));
  EXPECT_EQ(med.document["counterexample"]["k"], 3);

  const auto geo = run_audit("geometric", cfg);
  EXPECT_EQ(geo.exit_code, kSuccess);

  EXPECT_THROW((void)run_audit("mode", cfg), UnknownAggregator);
}

TEST(RunAudit, ToleranceOverrides) {
  RunConfig cfg;
  cfg.trials = 50;
  cfg.tolerances["associativity"] = 1e6;
  const auto doc = run_audit("median", cfg).document;
  EXPECT_EQ(doc["results"][4]["verdict"], "pass");
  cfg.tolerances["associativity"] = -1;
  EXPECT_THROW((void)run_audit("median", cfg), error);
  cfg.tolerances.clear();
  cfg.tolerances["bogus"] = 1;
  EXPECT_THROW((void)run_audit("median", cfg), error);
}

TEST(RunAudit, StructuredOutputIsReproducible) {
  RunConfig cfg;
  cfg.seed = 7;
  EXPECT_EQ(run_audit("median", cfg).document.dump(), run_audit("median", cfg).document.dump());
}

TEST(RenderTable, ProducesOneLinePerResult) {
  const auto text = render_table(run_means(csv("1\n2\n3\n"), means({"arithmetic", "geometric"})).document);
  EXPECT_NE(text.find("arithmetic\t2"), std::string::npos);
  EXPECT_NE(text.find("geometric"), std::string::npos);
}

TEST(Cli, MeanFromFileAndStdin) {
  const auto path = write_temp("qm_values.csv", "value\n1\n2\n3\n");
  const auto p = run("mean --means arithmetic,quadratic " + path);
  EXPECT_EQ(p.status, 0);
  const auto doc = nlohmann::json::parse(p.out);
  EXPECT_EQ(doc["results"][0]["value"].get<double>(), 2.0);

  const auto piped = run("mean --means geometric - < " + write_temp("qm_stdin.csv", "2\n8\n"));
  EXPECT_EQ(piped.status, 0);
  EXPECT_NEAR(nlohmann::json::parse(piped.out)["results"][0]["value"].get<double>(), 4.0, 4e-15);
}

TEST(Cli, JsonLinesAndWeights) {
  const auto path = write_temp("qm_w.jsonl", "{\"value\": 1, \"weight\": 0.25}\n{\"value\": 3, \"weight\": 0.75}\n");
  const auto p = run("mean --weights --means arithmetic " + path);
  EXPECT_EQ(p.status, 0);
  EXPECT_EQ(nlohmann::json::parse(p.out)["results"][0]["value"].get<double>(), 2.5);
  EXPECT_EQ(run("mean --weights --means arithmetic " + write_temp("qm_nw.csv", "1\n2\n")).status, 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("mean --means harmonic " + write_temp("qm_neg.csv", "1\n-1\n")).status, 2);
  EXPECT_EQ(run("mean --means arithmetic " + write_temp("qm_bad.csv", "1\nx\n")).status, 2);
  EXPECT_EQ(run("mean --means arithmetic /nonexistent/file.csv").status, 2);
  EXPECT_EQ(run("chisini --aggregate sum " + write_temp("qm_sum.csv", "1\n2\n3\n")).status, 0);
  EXPECT_EQ(run("audit --target median --trials 50 --strict").status, 4);
  EXPECT_EQ(run("audit --target median --trials 50").status, 0);
  EXPECT_EQ(run("audit --target arithmetic --trials 50 --strict").status, 0);
  EXPECT_EQ(run("audit --target nope").status, 1);
  EXPECT_EQ(run("frobnicate").status, 1);
}

TEST(Cli, SeedFromEnvironment) {
  const auto from_flag = run("audit --target median --trials 50 --seed 11");
  const auto from_env = run("audit --target median --trials 50", "QUASIMEAN_SEED=11 ");
  const auto default_seed = run("audit --target median --trials 50");
  EXPECT_EQ(from_env.out, from_flag.out);
  EXPECT_NE(from_env.out, default_seed.out);
  EXPECT_EQ(run("audit --target median --trials 50 --seed 0", "QUASIMEAN_SEED=11 ").out, default_seed.out);
}

TEST(Cli, AuditOutputIsByteIdentical) {
  const auto a = run("audit --target median --seed 7");
  const auto b = run("audit --target median --seed 7");
  EXPECT_EQ(a.status, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
}
