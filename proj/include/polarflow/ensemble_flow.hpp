#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "polarflow/ensemble.hpp"
#include "polarflow/model_core.hpp"
#include "polarflow/transport_metrics.hpp"

namespace polarflow {

enum class InitDistribution : std::uint8_t { truncated_gaussian, gaussian, dirac, explicit_list };

InitDistribution parse_init_distribution(std::string_view text);
std::string_view to_string(InitDistribution d);

struct PartyInit {
  InitDistribution distribution = InitDistribution::gaussian;
  double mean = 0.0;
  double std = 0.0;
  double lo = 0.0;  // truncation bounds, truncated_gaussian only
  double hi = 0.0;
  std::size_t count = 0;
  std::vector<double> positions;  // explicit_list only
};

struct InitSpec {
  std::vector<PartyInit> parties;
  std::uint64_t seed = 0;
};

// The truncated-Gaussian start used for the two-party experiments: N(-0.25,
// 0.15) on [-0.8, 0] and N(0.25, 0.15) on [0, 0.8]. With three_party the
// centrist N(0, 0.15) party is appended.
InitSpec nominal_init(std::size_t count, std::uint64_t seed, bool three_party = false);

// Draws every party from its own mt19937_64 stream seeded by (seed, party), so
// results are reproducible across platforms.
std::vector<ParticleEnsemble> sample_initial(const InitSpec& spec);

// Gradient of party i's expected votes at each of its particles: the mean over
// all opponent particle tuples of dV_i/dy_i. The velocity is k times this.
std::vector<double> wasserstein_gradient(std::span<const ParticleEnsemble> ensembles,
                                         const ModelParams& params, int party_index,
                                         int threads = 1);

// One synchronous pushforward step x -> x + tau k grad for every party.
std::vector<ParticleEnsemble> step(std::span<const ParticleEnsemble> ensembles,
                                   const ModelParams& params, double tau, int threads = 1);

struct VoteShares {
  std::vector<double> shares;
  double abstention;
};

VoteShares vote_shares(std::span<const ParticleEnsemble> ensembles, const ModelParams& params,
                       int threads = 1);

struct SnapshotDiagnostics {
  std::vector<DiagnosticSummary> summaries;
  std::vector<double> w2;  // n x n, row-major, symmetric
  VoteShares votes;

  double w2_between(std::size_t i, std::size_t j) const {
    return w2[i * summaries.size() + j];
  }
};

SnapshotDiagnostics diagnose(std::span<const ParticleEnsemble> ensembles,
                             const ModelParams& params, int threads = 1);

struct SimulationOptions {
  double tau = 0.05;
  long steps = 0;
  long record_every = 1;
  int threads = 1;
  // Stop once the largest particle displacement stays below
  // stop_displacement for stop_patience consecutive steps.
  bool early_stop = true;
  double stop_displacement = 1e-10;
  int stop_patience = 10;
  bool with_diagnostics = true;
};

struct EnsembleTrajectory {
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<std::vector<ParticleEnsemble>> snapshots;
  std::vector<SnapshotDiagnostics> diagnostics;  // empty unless with_diagnostics
  long steps_taken = 0;
  bool stopped_early = false;
  // True when no step ever changed the relative order of two particles of
  // the same party.
  bool order_preserved = true;
};

EnsembleTrajectory simulate(std::vector<ParticleEnsemble> initial, const ModelParams& params,
                            const SimulationOptions& options);
EnsembleTrajectory simulate(const InitSpec& init, const ModelParams& params,
                            const SimulationOptions& options);

}  // namespace polarflow
