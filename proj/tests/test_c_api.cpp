#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "polarflow/polarflow.h"

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "polarflow_c_api_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("params and point-model functions") {
  pf_params* p = nullptr;
  REQUIRE(pf_params_create(0.93, 0.6, 0.5, 2, nullptr, &p) == PF_OK);
  const double y0[2] = {0.0, 0.0};
  double v = 0;
  CHECK(pf_expected_votes(p, y0, 2, 0, &v) == PF_OK);
  CHECK(v == doctest::Approx(0.33460).epsilon(2e-5));
  double y = 0;
  CHECK(pf_polarized_equilibrium(p, &y) == PF_OK);
  const double ys[2] = {y, -y};
  double g = 1;
  CHECK(pf_grad_expected_votes(p, ys, 2, 0, &g) == PF_OK);
  CHECK(std::abs(g) <= 1e-10);
  CHECK(pf_expected_votes(p, y0, 2, 5, &v) == PF_ERR_INPUT);
  CHECK(std::string(pf_last_error()).find("party") != std::string::npos);
  pf_params_destroy(p);

  pf_params* bad = nullptr;
  CHECK(pf_params_create(0.93, -1.0, 0.5, 2, nullptr, &bad) == PF_ERR_INPUT);
  CHECK(bad == nullptr);
  CHECK(pf_params_create(0.93, 0.6, 0.5, 2, "coin", &bad) == PF_ERR_INPUT);
  CHECK(pf_params_create(0.93, 0.6, 0.5, 2, nullptr, nullptr) == PF_ERR_NULL);

  pf_params* wide = nullptr;
  REQUIRE(pf_params_create(0.93, 0.8, 0.5, 2, "exclusive", &wide) == PF_OK);
  CHECK(pf_polarized_equilibrium(wide, &y) == PF_ERR_REGIME);
  pf_params_destroy(wide);
  CHECK(pf_critical_ratio() == doctest::Approx(0.807).epsilon(1e-3));
}

TEST_CASE("equilibria handle") {
  pf_equilibria* eq = nullptr;
  REQUIRE(pf_equilibria_compute(0.6, 0.93, &eq) == PF_OK);
  double crit = 0, ratio = 0;
  int polarized = 0;
  size_t count = 0;
  CHECK(pf_equilibria_summary(eq, &crit, &ratio, &polarized, &count) == PF_OK);
  CHECK(polarized == 1);
  CHECK(count == 3);
  double pos[2], eig[2];
  pf_stability st;
  CHECK(pf_equilibria_get(eq, 0, pos, &st, eig) == PF_OK);
  CHECK(st == PF_UNSTABLE);
  CHECK(pf_equilibria_get(eq, 1, pos, &st, eig) == PF_OK);
  CHECK(st == PF_STABLE);
  CHECK(pos[0] == doctest::Approx(0.33398).epsilon(2e-4));
  CHECK(pf_equilibria_get(eq, 3, pos, &st, eig) == PF_ERR_INPUT);
  pf_equilibria_destroy(eq);
}

TEST_CASE("distances") {
  const double a[2] = {0, 1}, b[2] = {2, 3}, c[1] = {0}, d[2] = {-1, 1};
  double out = 0;
  CHECK(pf_w2(a, 2, b, 2, &out) == PF_OK);
  CHECK(out == 2.0);
  CHECK(pf_w2(c, 1, d, 2, &out) == PF_OK);
  CHECK(out == 1.0);
  CHECK(pf_w2(a, 0, b, 2, &out) == PF_ERR_INPUT);

  const auto file = scratch("positions.txt");
  write(file, "position\n0\n1\n");
  pf_ensemble* e = nullptr;
  REQUIRE(pf_ensemble_load(file.c_str(), &e) == PF_OK);
  CHECK(pf_ensemble_size(e) == 2);
  CHECK(pf_ensemble_data(e)[1] == 1.0);
  CHECK(pf_ensemble_w2(e, e, &out) == PF_OK);
  CHECK(out == 0.0);
  pf_ensemble_destroy(e);
  CHECK(pf_ensemble_load(scratch("missing.txt").c_str(), &e) == PF_ERR_IO);
}

TEST_CASE("simulate through the C API") {
  const auto cfg_path = scratch("run.cfg");
  write(cfg_path,
        "sigma = 0.6\nk = 0.5\ntau = 0.05\nsteps = 30\nrecord_every = 10\nseed = 1\n"
        "party.1.dist = gaussian\nparty.1.mean = -0.2\nparty.1.std = 0.1\nparty.1.count = 8\n"
        "party.2.dist = gaussian\nparty.2.mean = 0.2\nparty.2.std = 0.1\nparty.2.count = 8\n"
        "dataset_file = data.csv\n");
  pf_config* cfg = nullptr;
  REQUIRE(pf_config_load(cfg_path.c_str(), &cfg) == PF_OK);
  CHECK(pf_config_set_threads(cfg, 0) == PF_ERR_INPUT);
  pf_simulation* sim = nullptr;
  REQUIRE(pf_simulate(cfg, &sim) == PF_OK);
  pf_simulation_info info{};
  CHECK(pf_simulation_get_info(sim, &info) == PF_OK);
  CHECK(info.n_parties == 2);
  CHECK(info.snapshots == 4);
  CHECK(info.steps_taken == 30);
  double w2[4], abst = 0;
  CHECK(pf_simulation_final(sim, nullptr, nullptr, nullptr, &abst, w2) == PF_OK);
  CHECK(w2[1] == w2[2]);
  CHECK(abst > 0.0);
  const auto out = scratch("sim_out");
  CHECK(pf_simulation_write(sim, out.c_str()) == PF_OK);
  CHECK(std::filesystem::exists(out / "trajectory.csv"));
  CHECK(std::filesystem::exists(out / "diagnostics.csv"));

  pf_observed* obs = nullptr;
  REQUIRE(pf_observed_load((out / "data.csv").c_str(), &obs) == PF_OK);
  size_t periods = 0, parties = 0;
  CHECK(pf_observed_shape(obs, &periods, &parties) == PF_OK);
  CHECK(periods == 4);
  CHECK(parties == 2);
  pf_ensemble* slice = nullptr;
  CHECK(pf_ensemble_from_observed(obs, 3, "1", &slice) == PF_OK);
  CHECK(pf_ensemble_size(slice) == 8);
  pf_ensemble_destroy(slice);
  CHECK(pf_ensemble_from_observed(obs, 9, "1", &slice) == PF_ERR_INPUT);

  double obj = 1;
  pf_config* fit_cfg = nullptr;
  const auto fit_path = scratch("fit.cfg");
  write(fit_path, "steps_per_period = 10\nfit.grid_k = 3\nfit.grid_sigma = 3\nfit.max_evals = 40\n");
  REQUIRE(pf_config_load(fit_path.c_str(), &fit_cfg) == PF_OK);
  CHECK(pf_objective(obs, fit_cfg, 0.5, 0.6, &obj) == PF_OK);
  CHECK(obj <= 1e-12);
  pf_fit_result* fit = nullptr;
  REQUIRE(pf_fit(obs, fit_cfg, &fit) == PF_OK);
  pf_fit_summary s{};
  CHECK(pf_fit_get_summary(fit, &s) == PF_OK);
  CHECK(s.grid_points == 9);
  CHECK(s.objective >= 0.0);
  CHECK(pf_write_comparison(obs, fit_cfg, s.k, s.sigma, (out / "cmp.csv").c_str()) == PF_OK);
  CHECK(std::filesystem::exists(out / "cmp.csv"));
  pf_fit_result_destroy(fit);
  pf_config_destroy(fit_cfg);
  pf_observed_destroy(obs);
  pf_simulation_destroy(sim);
  pf_config_destroy(cfg);
}

TEST_CASE("config errors") {
  pf_config* cfg = nullptr;
  CHECK(pf_config_load(scratch("nope.cfg").c_str(), &cfg) == PF_ERR_IO);
  const auto path = scratch("bad.cfg");
  write(path, "sigma = 0.6\nwhat = 1\n");
  CHECK(pf_config_load(path.c_str(), &cfg) == PF_ERR_INPUT);
  CHECK(std::string(pf_last_error()).find("line 2") != std::string::npos);
}
