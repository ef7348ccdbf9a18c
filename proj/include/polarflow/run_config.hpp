#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polarflow/calibration.hpp"
#include "polarflow/ensemble_flow.hpp"
#include "polarflow/model_core.hpp"

namespace polarflow {

// Flat `key = value` run description; `#` starts a comment. Unknown or
// repeated keys are rejected with their line number.
//
//   sigma0, sigma, k, n_parties, tie_break
//   tau, steps, record_every, seed, threads, early_stop
//   trajectory_file, diagnostics_file, dataset_file
//   party.<i>.{dist, mean, std, lo, hi, count, positions}     (i from 1)
//   steps_per_period
//   fit.{k_min, k_max, sigma_min, sigma_max, grid_k, grid_sigma,
//        max_evals, tolerance, mode, init, resample_count}
struct RunConfig {
  double sigma0 = 0.93;
  std::optional<double> sigma;
  std::optional<double> k;
  std::optional<int> n_parties;
  TieBreak tie_break = TieBreak::automatic;

  double tau = 0.05;
  long steps = 0;
  long record_every = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool early_stop = true;

  std::string trajectory_file = "trajectory.csv";
  std::string diagnostics_file = "diagnostics.csv";
  std::string dataset_file;  // empty: not written

  std::vector<PartyInit> parties;

  long steps_per_period = 1;
  SearchSpec search;
  FitMode fit_mode = FitMode::distribution;
  InitMode fit_init = InitMode::observed;
  std::size_t resample_count = 300;

  // Each accessor validates the keys it needs and throws InputError.
  ModelParams model_params() const;
  InitSpec init_spec() const;
  SimulationOptions simulation_options() const;
  SimConfig sim_config() const;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace polarflow
