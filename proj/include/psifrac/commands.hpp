#pragma once

#include <cstdint>
#include <string>

namespace psifrac {

// Everything the CLI surface can override on top of the config file.
struct CliOptions {
  std::string config_path;
  std::string out_path;   // empty: derived from run.out_dir and run.label
  bool verbose = false;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int multistart = 0;     // solve; 0 = take from config
  int level = 0;          // eigen; 0 = take from config
  std::string sweep;      // eigen; "alpha=0.6:0.95:0.05"
  std::string audit;      // check; negative-theta | positive-theta
  std::string dump_weights;  // any subcommand; write the weight matrix and exit
};

// Exit codes: 0 success/converged, 1 computation failed or did not converge
// (outputs still written where possible), 2 invalid configuration.
int run_solve(const CliOptions& cli);
int run_eigen(const CliOptions& cli);
int run_check(const CliOptions& cli);
int run_converge(const CliOptions& cli);
int run_ibp_test(const CliOptions& cli);

// Diagnostic: write the left-integral quadrature weight matrix for the
// configured grid and order as CSV (row = target node, column = source node).
int run_dump_weights(const CliOptions& cli);

}  // namespace psifrac
