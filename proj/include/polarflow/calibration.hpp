#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "polarflow/ensemble.hpp"
#include "polarflow/model_core.hpp"

namespace polarflow {

// Observed ideology scores: one ensemble per (period, party). Periods are
// sorted ascending; parties are sorted by label (numerically when every label
// is an integer).
struct ObservedTrajectory {
  std::vector<long> periods;
  std::vector<std::string> parties;
  std::vector<std::vector<ParticleEnsemble>> ensembles;  // [period][party]
};

// CSV with header columns period, party, score (any order).
ObservedTrajectory parse_observed(std::istream& in);
ObservedTrajectory load_observed(const std::filesystem::path& path);

enum class FitMode : std::uint8_t {
  distribution,  // squared W2 between observed and simulated ensembles
  point_means,   // point model started from the observed means; squared mean error
};

enum class InitMode : std::uint8_t {
  observed,  // simulate from the observed first-period ensembles
  gaussian,  // resample N(mean, std) of each first-period ensemble
};

FitMode parse_fit_mode(std::string_view text);
InitMode parse_init_mode(std::string_view text);

struct SimConfig {
  double sigma0 = 0.93;
  double tau = 0.05;
  long steps_per_period = 1;
  TieBreak tie_break = TieBreak::automatic;
  int threads = 1;
  FitMode mode = FitMode::distribution;
  InitMode init = InitMode::observed;
  std::size_t resample_count = 300;
  std::uint64_t seed = 0;
};

// Model state at every observed period (index 0 is the initial condition).
std::vector<std::vector<ParticleEnsemble>> predict(double k, double sigma,
                                                   const ObservedTrajectory& observed,
                                                   const SimConfig& config);

// (1/T) sum_{t=1..T} sum_i W2(observed_i(t), simulated_i(t))^2.
double objective(double k, double sigma, const ObservedTrajectory& observed,
                 const SimConfig& config);

struct SearchSpec {
  double k_min = 1e-3;
  double k_max = 5.0;
  double sigma_min = 0.1;
  double sigma_max = 1.5;
  int grid_k = 6;
  int grid_sigma = 6;
  int max_evaluations = 500;  // simplex stage
  double tolerance = 1e-10;   // objective spread across the simplex
};

struct FitFailure {
  double k;
  double sigma;
  std::string message;
};

struct GridPoint {
  double k;
  double sigma;
  double objective;  // +inf when the evaluation failed
};

struct FitResult {
  double k = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<GridPoint> grid;
  std::vector<FitFailure> failures;
};

// Coarse logarithmic grid, then Nelder-Mead on (log k, log sigma) from the
// best grid point with every vertex projected into the box.
FitResult fit(const ObservedTrajectory& observed, const SimConfig& config,
              const SearchSpec& search);

}  // namespace polarflow
