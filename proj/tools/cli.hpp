#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace bfcs::cli {

struct CliConfig {
  std::string subcommand;

  // shared
  double nu = 4.0;
  std::string prior = "dmag-bk";
  std::optional<double> q;
  std::string constraints;  // file of "forbid a b" / "require a b" lines, nodes 1..3
  std::string output;       // empty: standard output
  std::uint64_t seed = 1;

  // scan
  std::string markers;
  std::string traits;
  char delimiter = '\t';
  std::string strategy = "max-over-markers";
  int threads = 1;
  std::string matrix_output;
  std::size_t top_k = 0;  // 0: every ordered pair
  bool quiet = false;

  // simulate
  std::string mode = "grn";  // grn | triplet
  std::string preset = "sparse";
  std::optional<long> m;
  std::optional<long> l;
  std::optional<double> edges;
  double link_prob = 0.05;
  std::int64_t n = 100;
  std::string out_dir;
  std::string model = "causal";
  std::string noise = "gaussian";

  // evaluate
  std::string scan_file;
  std::string truth_file;
  bool ancestral = false;
  std::size_t bins = 5;
  std::string binning = "equal-count";

  // priors
  std::optional<std::string> kind;  // dag | dmag; overrides --prior
  bool bk = false;
};

/// Executes a validated configuration. Returns the process exit status;
/// diagnostics go to `err`.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs. Parse errors exit nonzero with usage on `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bfcs::cli
