#pragma once

// Batch driver: verification suites and the solver behind one command line.
//
// Exit codes:
//   0  success
//   1  a check failed (identities, concavity search, geometry tolerances)
//   2  usage error or invalid input
//   3  constrained sampler starvation (concavity)
//   4  solver nonconvergence (solve)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hypk::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitStarved = 3,
  kExitNonConverged = 4,
};

struct RunConfig {
  std::string subcommand;
  std::uint64_t seed = 1;
  std::size_t budget = 0;  // 0: subcommand default
  std::filesystem::path out_dir;
  bool emit_plots = false;
  bool self_test_break = false;
  unsigned workers = 0;
};

struct IdentitiesOptions {
  int n_min = 3;
  int n_max = 8;
  std::size_t derivative_matrices = 0;  // 0: budget / 20
};

struct ConcavityOptions {
  int n = 3;
  int k = 2;
  int l = 1;
  std::vector<double> eps = {0.5};
  std::vector<double> delta = {0.5};
  std::vector<double> delta0 = {0.5};
  bool uniform = false;
  bool claim = false;
  std::size_t csv_rows = 10000;
};

struct GeomOptions {
  std::string preset = "perturbed:1.0,0.1";
  std::string graph_file;
  std::string mode;  // "" picks full for n = 2, axisymmetric otherwise
  int n = 2;
  int n_theta = 64;
  int n_phi = 0;     // 0: 2 n_theta
  int fd_order = 4;
  int depth = 2;
  int sites = 8;
  bool refine = true;
};

struct SolveOptions {
  std::string problem_file;
};

/// Resolves the output directory: explicit flag, then $HYPK_OUT_DIR, then
/// "hypk_out".
std::filesystem::path resolve_out_dir(const std::string& flag);

int cmd_identities(const RunConfig& run, const IdentitiesOptions& opt, std::ostream& log);
int cmd_concavity(const RunConfig& run, const ConcavityOptions& opt, std::ostream& log);
int cmd_geom(const RunConfig& run, const GeomOptions& opt, std::ostream& log);
int cmd_solve(const RunConfig& run, const SolveOptions& opt, std::ostream& log);

/// Parses argv and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Shared helpers.
void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
/// Minimal SVG line chart; log10 on the y axis when requested.
std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y);

}  // namespace hypk::cli
