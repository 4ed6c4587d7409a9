#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fouk/operator.hpp"
#include "fouk/verifier.hpp"

namespace fouk {

/// Parsed command-line run: command + subcommand, input paths, seed, numeric
/// knobs, output location and format. Paths are checked before any compute.
struct RunConfig {
  std::string command;
  std::string experiment;
  std::string op_path;
  std::string preset;
  std::string state_path;
  std::string out_dir;
  std::string format = "json";
  std::uint64_t seed = 0x5eed5eedULL;
  bool no_timestamp = false;
  int quad_order = 64;
  int opt_samples = 64;
  double rank_tol = kDefaultRankTol;
  double t_min = 1e-3;
  double t_max = 0.1;
  int t_points = 20;
  double t = 0.0;
  int grid_N = 128;
  double grid_L = 12.0;
  std::vector<std::vector<double>> directions;
  double lambda_max = 16.0;
  int lambda_points = 8;
  double q = 2.0;
  double tau = 1.0;
  double s = 1.0;
  VerifierConfig verifier;
};

/// Builds the operator from --op or --preset ("kolmogorov:s=1.0",
/// "fractional-heat:n=2,s=0.5").
OUOperator resolve_operator(const RunConfig& cfg);

/// Entry point: subcommands analyze | symbol | evolve | verify.
/// Exit codes: 0 success (all checks pass), 1 input/usage error,
/// 2 a verification ran and failed (reports still written).
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace fouk
