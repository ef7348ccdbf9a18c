#include "polarflow/polarflow.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "polarflow/calibration.hpp"
#include "polarflow/csv_io.hpp"
#include "polarflow/ensemble_flow.hpp"
#include "polarflow/errors.hpp"
#include "polarflow/point_flow.hpp"
#include "polarflow/run_config.hpp"
#include "polarflow/transport_metrics.hpp"

using namespace polarflow;

struct pf_params {
  ModelParams value;
};

struct pf_equilibria {
  EquilibriumReport report;
};

struct pf_config {
  RunConfig value;
};

struct pf_simulation {
  RunConfig config;
  EnsembleTrajectory trajectory;
};

struct pf_observed {
  ObservedTrajectory value;
};

struct pf_ensemble {
  ParticleEnsemble value;
};

struct pf_fit_result {
  FitResult value;
};

namespace {

thread_local std::string last_error;

pf_status fail(pf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
pf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return PF_OK;
  } catch (const DivergenceError& e) {
    return fail(PF_ERR_DIVERGENCE, e.what());
  } catch (const FitError& e) {
    return fail(PF_ERR_FIT, e.what());
  } catch (const RegimeError& e) {
    return fail(PF_ERR_REGIME, e.what());
  } catch (const InputError& e) {
    return fail(PF_ERR_INPUT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PF_ERR_IO, e.what());
  } catch (const IoError& e) {
    return fail(PF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PF_ERR_INTERNAL, "unknown error");
  }
}

#define PF_REQUIRE(ptr)                                        \
  do {                                                         \
    if (!(ptr)) return fail(PF_ERR_NULL, "null pointer: " #ptr); \
  } while (0)

PointState make_state(const double* positions, size_t n) {
  return PointState(std::vector<double>(positions, positions + n));
}

void write_file(const std::filesystem::path& path, void (*writer)(std::ostream&, const EnsembleTrajectory&),
                const EnsembleTrajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  writer(out, traj);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

extern "C" {

const char* pf_last_error(void) { return last_error.c_str(); }

const char* pf_version(void) { return "0.1.0"; }

pf_status pf_params_create(double sigma0, double sigma, double k, int n_parties,
                           const char* tie_break, pf_params** out) {
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const TieBreak rule = tie_break ? parse_tie_break(tie_break) : TieBreak::automatic;
    *out = new pf_params{ModelParams(sigma0, sigma, k, n_parties, rule)};
  });
}

void pf_params_destroy(pf_params* params) { delete params; }

pf_status pf_expected_votes(const pf_params* params, const double* positions, size_t n,
                            int party, double* out) {
  PF_REQUIRE(params);
  PF_REQUIRE(positions);
  PF_REQUIRE(out);
  return guarded([&] { *out = expected_votes_point(make_state(positions, n), params->value, party); });
}

pf_status pf_grad_expected_votes(const pf_params* params, const double* positions, size_t n,
                                 int party, double* out) {
  PF_REQUIRE(params);
  PF_REQUIRE(positions);
  PF_REQUIRE(out);
  return guarded([&] { *out = grad_expected_votes(make_state(positions, n), params->value, party); });
}

double pf_critical_ratio(void) { return critical_ratio(); }

pf_status pf_polarized_equilibrium(const pf_params* params, double* out) {
  PF_REQUIRE(params);
  PF_REQUIRE(out);
  return guarded([&] { *out = polarized_equilibrium(params->value); });
}

pf_status pf_equilibria_compute(double sigma, double sigma0, pf_equilibria** out) {
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    // k only scales the velocity field; stability signs do not depend on it.
    *out = new pf_equilibria{classify_equilibria(ModelParams(sigma0, sigma, 1.0, 2))};
  });
}

void pf_equilibria_destroy(pf_equilibria* eq) { delete eq; }

pf_status pf_equilibria_summary(const pf_equilibria* eq, double* critical, double* ratio,
                                int* polarized, size_t* count) {
  PF_REQUIRE(eq);
  if (critical) *critical = eq->report.critical_ratio;
  if (ratio) *ratio = eq->report.ratio;
  if (polarized) *polarized = eq->report.regime == Regime::polarized ? 1 : 0;
  if (count) *count = eq->report.equilibria.size();
  return PF_OK;
}

pf_status pf_equilibria_get(const pf_equilibria* eq, size_t index, double* positions,
                            pf_stability* stability, double* eigen_real) {
  PF_REQUIRE(eq);
  if (index >= eq->report.equilibria.size())
    return fail(PF_ERR_INPUT, "equilibrium index out of range");
  const auto& e = eq->report.equilibria[index];
  if (positions) std::copy(e.state.positions().begin(), e.state.positions().end(), positions);
  if (stability) {
    switch (e.stability) {
      case Stability::stable: *stability = PF_STABLE; break;
      case Stability::unstable: *stability = PF_UNSTABLE; break;
      case Stability::inconclusive: *stability = PF_INCONCLUSIVE; break;
    }
  }
  if (eigen_real) std::copy(e.eigenvalue_real_parts.begin(), e.eigenvalue_real_parts.end(), eigen_real);
  return PF_OK;
}

pf_status pf_w2(const double* a, size_t na, const double* b, size_t nb, double* out) {
  PF_REQUIRE(a);
  PF_REQUIRE(b);
  PF_REQUIRE(out);
  return guarded([&] { *out = w2(std::span<const double>(a, na), std::span<const double>(b, nb)); });
}

pf_status pf_config_load(const char* path, pf_config** out) {
  PF_REQUIRE(path);
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new pf_config{load_run_config(path)}; });
}

void pf_config_destroy(pf_config* config) { delete config; }

pf_status pf_config_set_seed(pf_config* config, uint64_t seed) {
  PF_REQUIRE(config);
  config->value.seed = seed;
  return PF_OK;
}

pf_status pf_config_set_threads(pf_config* config, int threads) {
  PF_REQUIRE(config);
  if (threads < 1) return fail(PF_ERR_INPUT, "threads must be >= 1");
  config->value.threads = threads;
  return PF_OK;
}

pf_status pf_simulate(const pf_config* config, pf_simulation** out) {
  PF_REQUIRE(config);
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const RunConfig& cfg = config->value;
    const ModelParams params = cfg.model_params();
    const InitSpec init = cfg.init_spec();
    const SimulationOptions options = cfg.simulation_options();
    *out = new pf_simulation{cfg, simulate(init, params, options)};
  });
}

void pf_simulation_destroy(pf_simulation* sim) { delete sim; }

pf_status pf_simulation_get_info(const pf_simulation* sim, pf_simulation_info* out) {
  PF_REQUIRE(sim);
  PF_REQUIRE(out);
  const auto& t = sim->trajectory;
  out->n_parties = t.snapshots.empty() ? 0 : t.snapshots.back().size();
  out->snapshots = t.snapshots.size();
  out->steps_taken = t.steps_taken;
  out->final_time = t.times.empty() ? 0.0 : t.times.back();
  out->stopped_early = t.stopped_early ? 1 : 0;
  out->order_preserved = t.order_preserved ? 1 : 0;
  return PF_OK;
}

pf_status pf_simulation_final(const pf_simulation* sim, double* means, double* stds,
                              double* shares, double* abstention, double* w2_out) {
  PF_REQUIRE(sim);
  if (sim->trajectory.diagnostics.empty()) return fail(PF_ERR_INPUT, "simulation has no diagnostics");
  const auto& d = sim->trajectory.diagnostics.back();
  for (std::size_t i = 0; i < d.summaries.size(); ++i) {
    if (means) means[i] = d.summaries[i].mean;
    if (stds) stds[i] = d.summaries[i].std;
    if (shares) shares[i] = d.votes.shares[i];
  }
  if (abstention) *abstention = d.votes.abstention;
  if (w2_out) std::copy(d.w2.begin(), d.w2.end(), w2_out);
  return PF_OK;
}

pf_status pf_simulation_write(const pf_simulation* sim, const char* out_dir) {
  PF_REQUIRE(sim);
  PF_REQUIRE(out_dir);
  return guarded([&] {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto& cfg = sim->config;
    write_file(dir / cfg.trajectory_file, write_trajectory_csv, sim->trajectory);
    write_file(dir / cfg.diagnostics_file, write_diagnostics_csv, sim->trajectory);
    if (!cfg.dataset_file.empty())
      write_file(dir / cfg.dataset_file, write_dataset_csv, sim->trajectory);
  });
}

pf_status pf_observed_load(const char* path, pf_observed** out) {
  PF_REQUIRE(path);
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new pf_observed{load_observed(path)}; });
}

void pf_observed_destroy(pf_observed* obs) { delete obs; }

pf_status pf_observed_shape(const pf_observed* obs, size_t* periods, size_t* parties) {
  PF_REQUIRE(obs);
  if (periods) *periods = obs->value.periods.size();
  if (parties) *parties = obs->value.parties.size();
  return PF_OK;
}

pf_status pf_ensemble_load(const char* path, pf_ensemble** out) {
  PF_REQUIRE(path);
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + path);
    *out = new pf_ensemble{ParticleEnsemble(read_position_column(in))};
  });
}

pf_status pf_ensemble_from_observed(const pf_observed* obs, long period, const char* party,
                                    pf_ensemble** out) {
  PF_REQUIRE(obs);
  PF_REQUIRE(party);
  PF_REQUIRE(out);
  *out = nullptr;
  const auto& o = obs->value;
  const auto p = std::find(o.periods.begin(), o.periods.end(), period);
  if (p == o.periods.end()) return fail(PF_ERR_INPUT, "period " + std::to_string(period) + " not in data");
  const auto q = std::find(o.parties.begin(), o.parties.end(), party);
  if (q == o.parties.end()) return fail(PF_ERR_INPUT, std::string("party '") + party + "' not in data");
  return guarded([&] {
    *out = new pf_ensemble{o.ensembles[p - o.periods.begin()][q - o.parties.begin()]};
  });
}

void pf_ensemble_destroy(pf_ensemble* ens) { delete ens; }

size_t pf_ensemble_size(const pf_ensemble* ens) { return ens ? ens->value.size() : 0; }

const double* pf_ensemble_data(const pf_ensemble* ens) {
  return ens ? ens->value.positions().data() : nullptr;
}

pf_status pf_ensemble_w2(const pf_ensemble* a, const pf_ensemble* b, double* out) {
  PF_REQUIRE(a);
  PF_REQUIRE(b);
  PF_REQUIRE(out);
  return guarded([&] { *out = w2(a->value, b->value); });
}

pf_status pf_objective(const pf_observed* obs, const pf_config* config, double k, double sigma,
                       double* out) {
  PF_REQUIRE(obs);
  PF_REQUIRE(config);
  PF_REQUIRE(out);
  return guarded([&] { *out = objective(k, sigma, obs->value, config->value.sim_config()); });
}

pf_status pf_fit(const pf_observed* obs, const pf_config* config, pf_fit_result** out) {
  PF_REQUIRE(obs);
  PF_REQUIRE(config);
  PF_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new pf_fit_result{fit(obs->value, config->value.sim_config(), config->value.search)};
  });
}

void pf_fit_result_destroy(pf_fit_result* result) { delete result; }

pf_status pf_fit_get_summary(const pf_fit_result* result, pf_fit_summary* out) {
  PF_REQUIRE(result);
  PF_REQUIRE(out);
  const auto& r = result->value;
  out->k = r.k;
  out->sigma = r.sigma;
  out->objective = r.objective;
  out->evaluations = r.evaluations;
  out->converged = r.converged ? 1 : 0;
  out->grid_points = r.grid.size();
  out->failures = r.failures.size();
  return PF_OK;
}

pf_status pf_fit_get_grid_point(const pf_fit_result* result, size_t index, double* k,
                                double* sigma, double* objective_out) {
  PF_REQUIRE(result);
  if (index >= result->value.grid.size()) return fail(PF_ERR_INPUT, "grid index out of range");
  const auto& g = result->value.grid[index];
  if (k) *k = g.k;
  if (sigma) *sigma = g.sigma;
  if (objective_out) *objective_out = g.objective;
  return PF_OK;
}

pf_status pf_fit_get_failure(const pf_fit_result* result, size_t index, double* k,
                             double* sigma, const char** message) {
  PF_REQUIRE(result);
  if (index >= result->value.failures.size()) return fail(PF_ERR_INPUT, "failure index out of range");
  const auto& f = result->value.failures[index];
  if (k) *k = f.k;
  if (sigma) *sigma = f.sigma;
  if (message) *message = f.message.c_str();
  return PF_OK;
}

pf_status pf_write_comparison(const pf_observed* obs, const pf_config* config, double k,
                              double sigma, const char* path) {
  PF_REQUIRE(obs);
  PF_REQUIRE(config);
  PF_REQUIRE(path);
  return guarded([&] {
    const auto predicted = predict(k, sigma, obs->value, config->value.sim_config());
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    write_comparison_csv(out, obs->value, predicted);
    out.flush();
    if (!out) throw IoError("failed writing " + p.string());
  });
}

}  // extern "C"
