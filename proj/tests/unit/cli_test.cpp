#include "lpmf/cli/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace lpmf;
using namespace lpmf::cli;
namespace fs = std::filesystem;

namespace {

const char* kFock = R"([model]
L = 12.566370614359172
n = 2
d = 3
N = 1
modes = shells:1
cutoff = 6
alpha = 0.25
K = 1

[fock]
t_end = 0.2
samples = 3
)";

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lpmf_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, MissingFieldNamesPath) {
  try {
    parse_config_text("[lattice]\nL = 10\n[lp]\nalpha = 0.1\ndt = 0.01\nt_end = 1\n", "lp");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.path, "lattice.n");
  }
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(parse_config_text("[lattice]\nL = -1\nn = 8\n[lp]\nalpha = 0.1\ndt = 0.01\nt_end = 1\n", "lp"),
               ConfigError);
  EXPECT_THROW(parse_config_text("[lattice]\nL = 1\nn = 7\n[lp]\nalpha = 0.1\ndt = 0.01\nt_end = 1\n", "lp"),
               ConfigError);
  EXPECT_THROW(parse_config_text("[lattice]\nL = 1\nn = 8\n[lp]\nalpha = x\ndt = 0.01\nt_end = 1\n", "lp"),
               ConfigError);
  EXPECT_THROW(parse_config_text(std::string(kFock) + "[sweep]\nN_list = 1, 0\n", "sweep"), ConfigError);
  EXPECT_THROW(parse_config_text("[run]\nmode = lp\n", "fock"), ConfigError);
  EXPECT_THROW(parse_config_text("[model\n", "fock"), ConfigError);
}

TEST(Config, HashDependsOnTextAndSeed) {
  EXPECT_EQ(config_hash("abc", 1), config_hash("abc", 1));
  EXPECT_NE(config_hash("abc", 1), config_hash("abc", 2));
  EXPECT_NE(config_hash("abc", 1), config_hash("abd", 1));
}

TEST(Cli, FockRunIsDeterministic) {
  const fs::path d = temp_dir("fock");
  const std::string cfg = write_file(d, "fock.ini", kFock);
  RunOptions o;
  o.quiet = true;
  o.out = (d / "a").string();
  ASSERT_EQ(run("fock", cfg, o), kOk);
  o.out = (d / "b").string();
  ASSERT_EQ(run("fock", cfg, o), kOk);
  for (const char* f : {"series.jsonl", "summary.csv", "manifest.json", "plotdata/trace_dist.csv"})
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  const json m = json::parse(slurp(d / "a" / "manifest.json"));
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["basis_dimension"], 8 * 924);
}

TEST(Cli, LpZeroDurationWritesSingleSnapshot) {
  const fs::path d = temp_dir("lp");
  const std::string cfg = write_file(
      d, "lp.ini", "[lattice]\nL = 10\nn = 8\n[lp]\nalpha = 0.1\ndt = 0.01\nt_end = 0\n");
  RunOptions o;
  o.quiet = true;
  o.out = (d / "out").string();
  ASSERT_EQ(run("lp", cfg, o), kOk);
  EXPECT_TRUE(fs::exists(d / "out" / "manifest.json"));
  EXPECT_TRUE(fs::exists(d / "out" / "snapshots" / "snapshot_0000.json"));
  EXPECT_FALSE(fs::exists(d / "out" / "snapshots" / "snapshot_0001.json"));
  const json snap = json::parse(slurp(d / "out" / "snapshots" / "snapshot_0000.json"));
  EXPECT_EQ(snap["lattice"]["n"], 8);
  EXPECT_EQ(snap["psi"].size(), 512u);
}

TEST(Cli, ExitCodes) {
  const fs::path d = temp_dir("codes");
  RunOptions o;
  o.quiet = true;
  o.out = (d / "out").string();
  EXPECT_EQ(run("fock", (d / "missing.ini").string(), o), kConfigError);
  const std::string no_seed = write_file(d, "b.ini", "[bounds]\noperator_checks = false\n");
  EXPECT_EQ(run("bounds", no_seed, o), kConfigError);
  std::string big = kFock;
  big.replace(big.find("cutoff = 6"), 10, "cutoff = 60");
  EXPECT_EQ(run("fock", write_file(d, "big.ini", big), o), kConfigError);
  std::string leaky = kFock;
  leaky.replace(leaky.find("alpha = 0.25"), 12, "alpha = 400");
  EXPECT_EQ(run("fock", write_file(d, "leaky.ini", leaky), o), kNumericalAbort);
}

TEST(Cli, BoundsWithoutOperatorChecks) {
  const fs::path d = temp_dir("bounds");
  const std::string cfg = write_file(d, "b.ini", "[run]\nseed = 3\n[bounds]\noperator_checks = false\nform_factor_K = 1, 4\n");
  RunOptions o;
  o.quiet = true;
  o.out = (d / "out").string();
  EXPECT_EQ(run("bounds", cfg, o), kOk);
  const json rep = json::parse(slurp(d / "out" / "report.json"));
  EXPECT_EQ(rep.size(), 11u);
  for (std::size_t i = 1; i < rep.size(); ++i) EXPECT_LE(rep[i - 1]["name"], rep[i]["name"]);
}

TEST(Cli, SweepIsolatesFailingCells) {
  const fs::path d = temp_dir("sweep");
  std::string text = kFock;
  text += "[sweep]\nN_list = 1, 2\nalpha_list = 0.25, 400\nthreads = 2\n";
  const std::string cfg = write_file(d, "s.ini", text);
  RunOptions o;
  o.quiet = true;
  o.out = (d / "out").string();
  EXPECT_EQ(run("sweep", cfg, o), kOk);
  const json m = json::parse(slurp(d / "out" / "manifest.json"));
  EXPECT_EQ(m["status"], "partial");
  int ok = 0;
  for (const auto& c : m["cells"]) ok += c["status"] == "ok";
  EXPECT_EQ(ok, 2);
}
