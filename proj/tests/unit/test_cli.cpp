#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path = fs::temp_directory_path() / (std::string("hypk_cli_") + info->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hypk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return hypk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const std::string kSphereProblem = R"({
  "graph": {"mode": "full", "n": 2, "n_theta": 8, "n_phi": 16, "preset": "sphere:0.6"},
  "k": 2,
  "rhs": {"kind": "general", "f": "coth(1)^2"}
})";

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}), hypk::cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}), hypk::cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}), hypk::cli::kExitOk);
  EXPECT_EQ(run_cli({"solve"}), hypk::cli::kExitUsage);
}

TEST(Cli, IdentitiesPassAndSelfTestBreakFails) {
  TempDir tmp;
  const auto out = tmp.path.string();
  EXPECT_EQ(run_cli({"--out", out, "--budget", "200", "--workers", "1", "identities", "--n-max", "4"}), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "identities.csv"));
  EXPECT_TRUE(fs::exists(tmp.path / "identities.json"));
  EXPECT_EQ(run_cli({"--out", out, "--budget", "200", "--self-test-break", "identities", "--n-max", "4"}), 1);
}

TEST(Cli, ConcavityExitCodes) {
  TempDir tmp;
  const auto out = tmp.path.string();
  EXPECT_EQ(run_cli({"--out", out, "concavity", "--n", "3", "--k", "2", "--l", "2"}), 2);
  EXPECT_EQ(run_cli({"--out", out, "concavity", "--eps", "0.5,x"}), 2);
  EXPECT_EQ(run_cli({"--out", out, "concavity", "--delta", "1.5"}), 2);
  EXPECT_EQ(run_cli({"--out", out, "--budget", "2000", "--workers", "1", "concavity", "--n", "3", "--k", "2", "--l", "1"}), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "concavity.json"));
  EXPECT_EQ(run_cli({"--out", out, "--budget", "100", "--workers", "1", "concavity", "--n", "8", "--k", "2", "--l", "1",
                     "--uniform"}),
            3);
}

TEST(Cli, GeomExitCodes) {
  TempDir tmp;
  const auto out = tmp.path.string();
  EXPECT_EQ(run_cli({"--out", out, "--workers", "1", "geom", "--graph", "sphere:1.0", "--n-theta", "16"}), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "geom_summary.csv"));
  EXPECT_EQ(run_cli({"--out", out, "geom", "--graph", "sphere:-1", "--n-theta", "16"}), 2);
  EXPECT_EQ(run_cli({"--out", out, "geom", "--graph-file", (tmp.path / "missing.json").string()}), 2);
}

TEST(Cli, SolveExitCodes) {
  TempDir tmp;
  const auto out = tmp.path.string();
  const auto ok = tmp.path / "ok.json";
  write(ok, kSphereProblem);
  EXPECT_EQ(run_cli({"--out", out, "--workers", "1", "solve", "--problem", ok.string()}), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "solution.json"));
  EXPECT_TRUE(fs::exists(tmp.path / "diagnostics.csv"));

  const auto capped = tmp.path / "capped.json";
  write(capped, R"({
    "graph": {"mode": "full", "n": 2, "n_theta": 8, "n_phi": 16, "preset": "sphere:0.6"},
    "k": 2, "rhs": {"kind": "general", "f": "coth(1)^2"}, "solver": {"max_iterations": 1}})");
  EXPECT_EQ(run_cli({"--out", out, "solve", "--problem", capped.string()}), 4);

  const auto bad = tmp.path / "bad.json";
  write(bad, R"({
    "graph": {"mode": "axisymmetric", "n": 2, "n_theta": 32, "n_phi": 1, "preset": "trig:1.0,0.0,0.45"},
    "k": 2, "rhs": {"kind": "general", "f": "2"}})");
  EXPECT_EQ(run_cli({"--out", out, "solve", "--problem", bad.string()}), 2);
}

TEST(Cli, FixedSeedGivesIdenticalBytes) {
  TempDir tmp;
  const auto a = tmp.path / "a";
  const auto b = tmp.path / "b";
  const auto problem = tmp.path / "p.json";
  write(problem, kSphereProblem);
  for (const auto& dir : {a, b}) {
    const auto o = dir.string();
    ASSERT_EQ(run_cli({"--out", o, "--seed", "9", "--budget", "200", "identities", "--n-max", "4"}), 0);
    ASSERT_EQ(run_cli({"--out", o, "--seed", "9", "--budget", "1000", "concavity"}), 0);
    ASSERT_EQ(run_cli({"--out", o, "geom", "--graph", "perturbed:1.0,0.1"}), 0);
    ASSERT_EQ(run_cli({"--out", o, "solve", "--problem", problem.string()}), 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 8u);
}

TEST(Cli, OutDirFromEnvironment) {
  TempDir tmp;
  const auto dir = tmp.path / "env_out";
  ::setenv("HYPK_OUT_DIR", dir.c_str(), 1);
  EXPECT_EQ(hypk::cli::resolve_out_dir(""), dir);
  EXPECT_EQ(hypk::cli::resolve_out_dir("explicit"), fs::path("explicit"));
  ::unsetenv("HYPK_OUT_DIR");
  EXPECT_EQ(hypk::cli::resolve_out_dir(""), fs::path("hypk_out"));
}
