#include "polarflow/ensemble_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "flow_step.hpp"
#include "kernels.hpp"
#include "polarflow/errors.hpp"

namespace polarflow {

namespace {

// Marsaglia polar method on top of a 53-bit uniform; std::normal_distribution
// is implementation-defined and would break cross-platform reproducibility.
class NormalSource {
 public:
  NormalSource(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

constexpr long kMaxRejections = 10'000'000;

ParticleEnsemble sample_party(const PartyInit& p, std::uint64_t seed, std::size_t index) {
  const std::string who = "party " + std::to_string(index + 1) + ": ";
  if (p.distribution == InitDistribution::explicit_list) {
    if (p.positions.empty()) throw InputError(who + "explicit list is empty");
    return ParticleEnsemble(p.positions);
  }
  if (p.count == 0) throw InputError(who + "particle count must be >= 1");
  if (!std::isfinite(p.mean)) throw InputError(who + "mean must be finite");
  if (p.distribution == InitDistribution::dirac) return ParticleEnsemble::dirac(p.mean, p.count);
  if (!std::isfinite(p.std) || !(p.std > 0.0)) throw InputError(who + "std must be positive");

  NormalSource normal(seed, index);
  std::vector<double> out;
  out.reserve(p.count);
  if (p.distribution == InitDistribution::gaussian) {
    while (out.size() < p.count) out.push_back(p.mean + p.std * normal.next());
    return ParticleEnsemble(std::move(out));
  }
  if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
    throw InputError(who + "truncation bounds need lo < hi");
  long attempts = 0;
  while (out.size() < p.count) {
    const double x = p.mean + p.std * normal.next();
    if (x > p.lo && x < p.hi)
      out.push_back(x);
    else if (++attempts > kMaxRejections)
      throw InputError(who + "truncation interval has negligible probability mass");
  }
  return ParticleEnsemble(std::move(out));
}

std::vector<std::span<const double>> views(std::span<const ParticleEnsemble> ensembles) {
  std::vector<std::span<const double>> out;
  out.reserve(ensembles.size());
  for (const auto& e : ensembles) out.push_back(e.positions());
  return out;
}

void check_parties(std::span<const ParticleEnsemble> ensembles, const ModelParams& params) {
  if (ensembles.size() != static_cast<std::size_t>(params.n_parties()))
    throw InputError("got " + std::to_string(ensembles.size()) + " ensembles for " +
                     std::to_string(params.n_parties()) + " parties");
  for (const auto& e : ensembles)
    if (e.size() == 0) throw InputError("party ensembles must be non-empty");
}

struct RawStep {
  std::vector<std::vector<double>> positions;
  double max_displacement = 0.0;
};

RawStep raw_step(std::span<const ParticleEnsemble> ensembles, const detail::KernelTable& table,
                 double tau, int threads) {
  const auto parties = views(ensembles);
  const ModelParams& params = table.params();
  RawStep out;
  out.positions.resize(parties.size());
  // All velocities come from the pre-step state.
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const auto field = detail::party_field(table, parties, static_cast<int>(i), false, threads);
    auto& next = out.positions[i];
    next.resize(parties[i].size());
    for (std::size_t r = 0; r < next.size(); ++r) {
      next[r] = detail::advance(parties[i][r], tau, params.k(), field.grad[r]);
      out.max_displacement = std::max(out.max_displacement, std::abs(next[r] - parties[i][r]));
    }
  }
  return out;
}

bool order_kept(std::span<const double> before, std::span<const double> after) {
  std::vector<std::size_t> idx(before.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return before[a] < before[b]; });
  for (std::size_t r = 1; r < idx.size(); ++r)
    if (after[idx[r]] < after[idx[r - 1]]) return false;
  return true;
}

}  // namespace

InitDistribution parse_init_distribution(std::string_view text) {
  if (text == "truncated-gaussian") return InitDistribution::truncated_gaussian;
  if (text == "gaussian") return InitDistribution::gaussian;
  if (text == "dirac") return InitDistribution::dirac;
  if (text == "explicit-list") return InitDistribution::explicit_list;
  throw InputError("unknown distribution '" + std::string(text) +
                   "' (expected truncated-gaussian, gaussian, dirac or explicit-list)");
}

std::string_view to_string(InitDistribution d) {
  switch (d) {
    case InitDistribution::truncated_gaussian: return "truncated-gaussian";
    case InitDistribution::gaussian: return "gaussian";
    case InitDistribution::dirac: return "dirac";
    case InitDistribution::explicit_list: return "explicit-list";
  }
  return "gaussian";
}

InitSpec nominal_init(std::size_t count, std::uint64_t seed, bool three_party) {
  InitSpec spec;
  spec.seed = seed;
  spec.parties.push_back({InitDistribution::truncated_gaussian, -0.25, 0.15, -0.8, 0.0, count, {}});
  spec.parties.push_back({InitDistribution::truncated_gaussian, 0.25, 0.15, 0.0, 0.8, count, {}});
  if (three_party)
    spec.parties.push_back({InitDistribution::gaussian, 0.0, 0.15, 0.0, 0.0, count, {}});
  return spec;
}

std::vector<ParticleEnsemble> sample_initial(const InitSpec& spec) {
  if (spec.parties.empty()) throw InputError("init spec lists no parties");
  std::vector<ParticleEnsemble> out;
  out.reserve(spec.parties.size());
  for (std::size_t i = 0; i < spec.parties.size(); ++i)
    out.push_back(sample_party(spec.parties[i], spec.seed, i));
  return out;
}

std::vector<double> wasserstein_gradient(std::span<const ParticleEnsemble> ensembles,
                                         const ModelParams& params, int party_index,
                                         int threads) {
  check_parties(ensembles, params);
  if (party_index < 0 || party_index >= params.n_parties())
    throw InputError("party index out of range");
  const detail::KernelTable table(params);
  const auto parties = views(ensembles);
  return detail::party_field(table, parties, party_index, false, threads).grad;
}

std::vector<ParticleEnsemble> step(std::span<const ParticleEnsemble> ensembles,
                                   const ModelParams& params, double tau, int threads) {
  check_parties(ensembles, params);
  if (!std::isfinite(tau) || !(tau > 0.0)) throw InputError("tau must be positive");
  const detail::KernelTable table(params);
  auto raw = raw_step(ensembles, table, tau, threads);
  std::vector<ParticleEnsemble> out;
  for (auto& p : raw.positions) {
    for (double y : p)
      if (!std::isfinite(y)) throw DivergenceError("particle left the finite range", 1);
    out.emplace_back(std::move(p));
  }
  return out;
}

VoteShares vote_shares(std::span<const ParticleEnsemble> ensembles, const ModelParams& params,
                       int threads) {
  check_parties(ensembles, params);
  const detail::KernelTable table(params);
  const auto parties = views(ensembles);
  VoteShares out;
  double total = 0.0;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const auto field = detail::party_field(table, parties, static_cast<int>(i), true, threads);
    double sum = 0.0;
    for (double v : field.value) sum += v;
    out.shares.push_back(sum / static_cast<double>(field.value.size()));
    total += out.shares.back();
  }
  out.abstention = 1.0 - total;
  return out;
}

SnapshotDiagnostics diagnose(std::span<const ParticleEnsemble> ensembles,
                             const ModelParams& params, int threads) {
  SnapshotDiagnostics d;
  const std::size_t n = ensembles.size();
  for (const auto& e : ensembles) d.summaries.push_back(summarize(e));
  d.w2.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d.w2[i * n + j] = d.w2[j * n + i] = w2(ensembles[i], ensembles[j]);
  d.votes = vote_shares(ensembles, params, threads);
  return d;
}

EnsembleTrajectory simulate(std::vector<ParticleEnsemble> initial, const ModelParams& params,
                            const SimulationOptions& options) {
  check_parties(initial, params);
  if (!std::isfinite(options.tau) || !(options.tau > 0.0)) throw InputError("tau must be positive");
  if (options.steps < 0) throw InputError("steps must be non-negative");
  if (options.record_every < 1) throw InputError("record_every must be >= 1");

  const detail::KernelTable table(params);
  EnsembleTrajectory traj;
  auto record = [&](long s, const std::vector<ParticleEnsemble>& state) {
    traj.steps.push_back(s);
    traj.times.push_back(static_cast<double>(s) * options.tau);
    traj.snapshots.push_back(state);
    if (options.with_diagnostics) traj.diagnostics.push_back(diagnose(state, params, options.threads));
  };

  std::vector<ParticleEnsemble> state = std::move(initial);
  record(0, state);
  int quiet_steps = 0;
  long s = 0;
  while (s < options.steps) {
    auto raw = raw_step(state, table, options.tau, options.threads);
    ++s;
    std::vector<ParticleEnsemble> next;
    next.reserve(raw.positions.size());
    for (std::size_t i = 0; i < raw.positions.size(); ++i) {
      for (double y : raw.positions[i])
        if (!std::isfinite(y))
          throw DivergenceError("party " + std::to_string(i + 1) + " left the finite range", s);
      if (traj.order_preserved && !order_kept(state[i].positions(), raw.positions[i]))
        traj.order_preserved = false;
      next.emplace_back(std::move(raw.positions[i]));
    }
    state = std::move(next);

    quiet_steps = raw.max_displacement < options.stop_displacement ? quiet_steps + 1 : 0;
    const bool stop = options.early_stop && quiet_steps >= options.stop_patience;
    if (stop) traj.stopped_early = true;
    if (s % options.record_every == 0 || s == options.steps || stop) record(s, state);
    if (stop) break;
  }
  traj.steps_taken = s;
  return traj;
}

EnsembleTrajectory simulate(const InitSpec& init, const ModelParams& params,
                            const SimulationOptions& options) {
  return simulate(sample_initial(init), params, options);
}

}  // namespace polarflow
