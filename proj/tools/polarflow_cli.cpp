#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polarflow/polarflow.h"

using json = nlohmann::json;

namespace {

constexpr double kNearCriticalBand = 0.01;

struct Deleter {
  void operator()(pf_config* p) const { pf_config_destroy(p); }
  void operator()(pf_simulation* p) const { pf_simulation_destroy(p); }
  void operator()(pf_equilibria* p) const { pf_equilibria_destroy(p); }
  void operator()(pf_observed* p) const { pf_observed_destroy(p); }
  void operator()(pf_ensemble* p) const { pf_ensemble_destroy(p); }
  void operator()(pf_fit_result* p) const { pf_fit_result_destroy(p); }
};

template <class T>
using Handle = std::unique_ptr<T, Deleter>;

struct Failure {
  pf_status status;
};

int exit_code(pf_status s) {
  switch (s) {
    case PF_OK: return 0;
    case PF_ERR_DIVERGENCE: return 2;
    case PF_ERR_FIT: return 3;
    default: return 1;
  }
}

void check(pf_status s) {
  if (s != PF_OK) throw Failure{s};
}

// JSON has no infinity; failed grid evaluations are reported as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* stability_name(pf_stability s) {
  switch (s) {
    case PF_STABLE: return "stable";
    case PF_UNSTABLE: return "unstable";
    default: return "inconclusive";
  }
}

Handle<pf_config> load_config(const std::string& path, std::optional<std::uint64_t> seed,
                              std::optional<int> threads) {
  pf_config* raw = nullptr;
  check(pf_config_load(path.c_str(), &raw));
  Handle<pf_config> cfg(raw);
  if (seed) check(pf_config_set_seed(cfg.get(), *seed));
  if (threads) check(pf_config_set_threads(cfg.get(), *threads));
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::optional<int> threads, bool as_json) {
  auto cfg = load_config(config_path, seed, threads);
  pf_simulation* raw = nullptr;
  check(pf_simulate(cfg.get(), &raw));
  Handle<pf_simulation> sim(raw);
  check(pf_simulation_write(sim.get(), out_dir.c_str()));

  pf_simulation_info info{};
  check(pf_simulation_get_info(sim.get(), &info));
  const std::size_t n = info.n_parties;
  std::vector<double> means(n), stds(n), shares(n), w2(n * n);
  double abstention = 0.0;
  check(pf_simulation_final(sim.get(), means.data(), stds.data(), shares.data(), &abstention,
                            w2.data()));

  if (as_json) {
    json parties = json::array();
    for (std::size_t i = 0; i < n; ++i)
      parties.push_back({{"party", i + 1}, {"mean", means[i]}, {"std", stds[i]}, {"vote_share", shares[i]}});
    json distances = json::object();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        distances["w2_" + std::to_string(i + 1) + "_" + std::to_string(j + 1)] = w2[i * n + j];
    json doc = {{"steps_taken", info.steps_taken},
                {"final_time", info.final_time},
                {"stopped_early", info.stopped_early != 0},
                {"order_preserved", info.order_preserved != 0},
                {"abstention", abstention},
                {"parties", parties},
                {"w2", distances},
                {"out_dir", out_dir}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  std::cout << "steps=" << info.steps_taken << " time=" << fmt(info.final_time);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      std::cout << " w2_" << i + 1 << '_' << j + 1 << '=' << fmt(w2[i * n + j]);
  std::cout << " abstention=" << fmt(abstention);
  for (std::size_t i = 0; i < n; ++i) std::cout << " std_" << i + 1 << '=' << fmt(stds[i]);
  if (info.stopped_early) std::cout << " (stationary)";
  std::cout << '\n';
  return 0;
}

int cmd_equilibria(double sigma, double sigma0, bool as_json) {
  pf_equilibria* raw = nullptr;
  check(pf_equilibria_compute(sigma, sigma0, &raw));
  Handle<pf_equilibria> eq(raw);
  double critical = 0.0, ratio = 0.0;
  int polarized = 0;
  std::size_t count = 0;
  check(pf_equilibria_summary(eq.get(), &critical, &ratio, &polarized, &count));
  const bool near = std::abs(ratio / critical - 1.0) < kNearCriticalBand;

  json list = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    double pos[2], eig[2];
    pf_stability st{};
    check(pf_equilibria_get(eq.get(), i, pos, &st, eig));
    list.push_back({{"positions", {pos[0], pos[1]}},
                    {"stability", stability_name(st)},
                    {"eigenvalue_real_parts", {eig[0], eig[1]}}});
  }

  if (as_json) {
    json doc = {{"sigma", sigma},
                {"sigma0", sigma0},
                {"ratio", ratio},
                {"critical_ratio", critical},
                {"regime", polarized ? "polarized" : "consensus"},
                {"near_critical", near},
                {"equilibria", list}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  char line[160];
  std::snprintf(line, sizeof line, "regime: %s (sigma/sigma0 = %.6f, critical ratio = %.6f)\n",
                polarized ? "polarized" : "consensus", ratio, critical);
  std::cout << line;
  if (near)
    std::cout << "note: near-critical, sigma/sigma0 is within 1% of the critical ratio; "
                 "the polarized pair sits close to the origin and stability may be inconclusive\n";
  for (const auto& e : list) {
    std::snprintf(line, sizeof line, "  (%+.6f, %+.6f)  %-12s  eig re: %.3e, %.3e\n",
                  e["positions"][0].get<double>(), e["positions"][1].get<double>(),
                  e["stability"].get<std::string>().c_str(),
                  e["eigenvalue_real_parts"][0].get<double>(),
                  e["eigenvalue_real_parts"][1].get<double>());
    std::cout << line;
  }
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> threads) {
  auto cfg = load_config(config_path, seed, threads);
  pf_observed* raw_obs = nullptr;
  check(pf_observed_load(data_path.c_str(), &raw_obs));
  Handle<pf_observed> obs(raw_obs);
  pf_fit_result* raw_fit = nullptr;
  check(pf_fit(obs.get(), cfg.get(), &raw_fit));
  Handle<pf_fit_result> result(raw_fit);

  pf_fit_summary s{};
  check(pf_fit_get_summary(result.get(), &s));
  json grid = json::array();
  for (std::size_t i = 0; i < s.grid_points; ++i) {
    double k = 0.0, sigma = 0.0, obj = 0.0;
    check(pf_fit_get_grid_point(result.get(), i, &k, &sigma, &obj));
    grid.push_back({{"k", k}, {"sigma", sigma}, {"objective", number(obj)}});
  }
  json failures = json::array();
  for (std::size_t i = 0; i < s.failures; ++i) {
    double k = 0.0, sigma = 0.0;
    const char* msg = nullptr;
    check(pf_fit_get_failure(result.get(), i, &k, &sigma, &msg));
    failures.push_back({{"k", k}, {"sigma", sigma}, {"message", msg}});
  }
  const auto comparison = (std::filesystem::path(out_dir) / "fit_comparison.csv").string();
  check(pf_write_comparison(obs.get(), cfg.get(), s.k, s.sigma, comparison.c_str()));

  json doc = {{"k", s.k},
              {"sigma", s.sigma},
              {"objective", number(s.objective)},
              {"evaluations", s.evaluations},
              {"converged", s.converged != 0},
              {"grid", grid},
              {"failures", failures},
              {"comparison_file", comparison}};
  std::cout << doc.dump(2) << '\n';
  return 0;
}

Handle<pf_ensemble> load_slice(const std::string& path, std::optional<long> period,
                               const std::optional<std::string>& party) {
  pf_ensemble* raw = nullptr;
  if (period || party) {
    if (!period || !party) {
      std::cerr << "error: --period and --party must be given together\n";
      throw Failure{PF_ERR_INPUT};
    }
    pf_observed* raw_obs = nullptr;
    check(pf_observed_load(path.c_str(), &raw_obs));
    Handle<pf_observed> obs(raw_obs);
    check(pf_ensemble_from_observed(obs.get(), *period, party->c_str(), &raw));
  } else {
    check(pf_ensemble_load(path.c_str(), &raw));
  }
  return Handle<pf_ensemble>(raw);
}

int cmd_distance(const std::string& a, const std::string& b, std::optional<long> period,
                 const std::optional<std::string>& party) {
  auto ea = load_slice(a, period, party);
  auto eb = load_slice(b, period, party);
  double d = 0.0;
  check(pf_ensemble_w2(ea.get(), eb.get(), &d));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", d);
  std::cout << buf << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satisficing vote model: particle gradient flows, equilibria and calibration", "polarflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pf_version());

  std::string config_path, out_dir = ".", data_path, file_a, file_b;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<long> period;
  std::optional<std::string> party;
  bool as_json = false;
  double sigma = 0.0, sigma0 = 0.93;

  auto* simulate = app.add_subcommand("simulate", "Run a particle simulation from a config file");
  simulate->add_option("--config", config_path, "Run configuration")->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_flag("--json", as_json, "Print the final summary as JSON");

  auto* equilibria = app.add_subcommand("equilibria", "Two-party equilibria of the point model");
  equilibria->add_option("--sigma", sigma, "Satisficing tolerance")->required();
  equilibria->add_option("--sigma0", sigma0, "Public opinion std")->capture_default_str();
  equilibria->add_flag("--json", as_json, "Print as JSON");

  auto* fit = app.add_subcommand("fit", "Calibrate k and sigma against observed scores");
  fit->add_option("--data", data_path, "CSV with period, party, score columns")->required();
  fit->add_option("--config", config_path, "Simulation and search settings")->required();
  fit->add_option("--out", out_dir, "Directory for fit_comparison.csv");
  fit->add_option("--seed", seed, "Override the config seed");
  fit->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  fit->add_flag("--json", as_json, "Accepted for symmetry; output is always JSON");

  auto* distance = app.add_subcommand("distance", "Wasserstein-2 distance between two position sets");
  distance->add_option("file_a", file_a, "Position file or dataset CSV")->required();
  distance->add_option("file_b", file_b, "Position file or dataset CSV")->required();
  distance->add_option("--period", period, "Dataset period to select");
  distance->add_option("--party", party, "Dataset party to select");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, out_dir, seed, threads, as_json);
    if (*equilibria) return cmd_equilibria(sigma, sigma0, as_json);
    if (*fit) return cmd_fit(data_path, config_path, out_dir, seed, threads);
    if (*distance) return cmd_distance(file_a, file_b, period, party);
  } catch (const Failure& f) {
    const std::string msg = pf_last_error();
    if (!msg.empty()) std::cerr << "error: " << msg << '\n';
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
