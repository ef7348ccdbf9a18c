#ifndef POLARFLOW_H
#define POLARFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(POLARFLOW_BUILDING_LIBRARY)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_INPUT = 1,
  PF_ERR_DIVERGENCE = 2,
  PF_ERR_FIT = 3,
  PF_ERR_REGIME = 4,
  PF_ERR_IO = 5,
  PF_ERR_NULL = 6,
  PF_ERR_INTERNAL = 7
} pf_status;

typedef enum pf_stability { PF_STABLE = 0, PF_UNSTABLE = 1, PF_INCONCLUSIVE = 2 } pf_stability;

/* Message of the last failed call on this thread. Never NULL. */
PF_API const char* pf_last_error(void);
PF_API const char* pf_version(void);

/* Model parameters. tie_break is "auto", "exclusive", "uniform" or NULL (auto). */
typedef struct pf_params pf_params;

PF_API pf_status pf_params_create(double sigma0, double sigma, double k, int n_parties,
                                  const char* tie_break, pf_params** out);
PF_API void pf_params_destroy(pf_params* params);

PF_API pf_status pf_expected_votes(const pf_params* params, const double* positions,
                                   size_t n, int party, double* out);
PF_API pf_status pf_grad_expected_votes(const pf_params* params, const double* positions,
                                        size_t n, int party, double* out);
PF_API double pf_critical_ratio(void);
PF_API pf_status pf_polarized_equilibrium(const pf_params* params, double* out);

/* Two-party equilibria of the point model. */
typedef struct pf_equilibria pf_equilibria;

PF_API pf_status pf_equilibria_compute(double sigma, double sigma0, pf_equilibria** out);
PF_API void pf_equilibria_destroy(pf_equilibria* eq);
PF_API pf_status pf_equilibria_summary(const pf_equilibria* eq, double* critical_ratio,
                                       double* ratio, int* polarized, size_t* count);
/* positions and eigen_real each receive two values. */
PF_API pf_status pf_equilibria_get(const pf_equilibria* eq, size_t index, double* positions,
                                   pf_stability* stability, double* eigen_real);

PF_API pf_status pf_w2(const double* a, size_t na, const double* b, size_t nb, double* out);

/* Run configuration file. */
typedef struct pf_config pf_config;

PF_API pf_status pf_config_load(const char* path, pf_config** out);
PF_API void pf_config_destroy(pf_config* config);
PF_API pf_status pf_config_set_seed(pf_config* config, uint64_t seed);
PF_API pf_status pf_config_set_threads(pf_config* config, int threads);

typedef struct pf_simulation pf_simulation;

typedef struct pf_simulation_info {
  size_t n_parties;
  size_t snapshots;
  long steps_taken;
  double final_time;
  int stopped_early;
  int order_preserved;
} pf_simulation_info;

PF_API pf_status pf_simulate(const pf_config* config, pf_simulation** out);
PF_API void pf_simulation_destroy(pf_simulation* sim);
PF_API pf_status pf_simulation_get_info(const pf_simulation* sim, pf_simulation_info* out);
/* Final snapshot. means, stds and shares take n_parties values, w2 takes
   n_parties * n_parties (row-major). Any output may be NULL. */
PF_API pf_status pf_simulation_final(const pf_simulation* sim, double* means, double* stds,
                                     double* shares, double* abstention, double* w2);
/* Writes the trajectory, diagnostics and (when configured) dataset files
   named in the config into out_dir, which is created if missing. */
PF_API pf_status pf_simulation_write(const pf_simulation* sim, const char* out_dir);

/* Observed scores: CSV with period, party and score columns. */
typedef struct pf_observed pf_observed;

PF_API pf_status pf_observed_load(const char* path, pf_observed** out);
PF_API void pf_observed_destroy(pf_observed* obs);
PF_API pf_status pf_observed_shape(const pf_observed* obs, size_t* periods, size_t* parties);

typedef struct pf_ensemble pf_ensemble;

/* Single-column position file with a header line. */
PF_API pf_status pf_ensemble_load(const char* path, pf_ensemble** out);
PF_API pf_status pf_ensemble_from_observed(const pf_observed* obs, long period,
                                           const char* party, pf_ensemble** out);
PF_API void pf_ensemble_destroy(pf_ensemble* ens);
PF_API size_t pf_ensemble_size(const pf_ensemble* ens);
PF_API const double* pf_ensemble_data(const pf_ensemble* ens);
PF_API pf_status pf_ensemble_w2(const pf_ensemble* a, const pf_ensemble* b, double* out);

typedef struct pf_fit_result pf_fit_result;

typedef struct pf_fit_summary {
  double k;
  double sigma;
  double objective;
  int evaluations;
  int converged;
  size_t grid_points;
  size_t failures;
} pf_fit_summary;

PF_API pf_status pf_objective(const pf_observed* obs, const pf_config* config, double k,
                              double sigma, double* out);
PF_API pf_status pf_fit(const pf_observed* obs, const pf_config* config, pf_fit_result** out);
PF_API void pf_fit_result_destroy(pf_fit_result* result);
PF_API pf_status pf_fit_get_summary(const pf_fit_result* result, pf_fit_summary* out);
PF_API pf_status pf_fit_get_grid_point(const pf_fit_result* result, size_t index, double* k,
                                       double* sigma, double* objective);
/* message stays valid until the result is destroyed. */
PF_API pf_status pf_fit_get_failure(const pf_fit_result* result, size_t index, double* k,
                                    double* sigma, const char** message);
/* period,party,source,mean,std,w2 for observed data against the model at (k, sigma). */
PF_API pf_status pf_write_comparison(const pf_observed* obs, const pf_config* config, double k,
                                     double sigma, const char* path);

#ifdef __cplusplus
}
#endif

#endif
