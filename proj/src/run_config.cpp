#include "polarflow/run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "polarflow/errors.hpp"
#include "text_util.hpp"

namespace polarflow {

namespace {

constexpr int kMaxConfigParties = 16;

double to_double(std::string_view v, std::size_t line) {
  const auto d = detail::parse_double(v);
  if (!d || !std::isfinite(*d)) throw ParseError("'" + std::string(v) + "' is not a finite number", line);
  return *d;
}

template <class Int>
Int to_int(std::string_view v, std::size_t line) {
  const auto i = detail::parse_int<Int>(v);
  if (!i) throw ParseError("'" + std::string(v) + "' is not an integer", line);
  return *i;
}

bool to_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("'" + std::string(v) + "' is not a boolean", line);
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;

const std::map<std::string, Setter, std::less<>>& global_keys() {
  static const std::map<std::string, Setter, std::less<>> keys = {
      {"sigma0", [](RunConfig& c, auto v, auto l) { c.sigma0 = to_double(v, l); }},
      {"sigma", [](RunConfig& c, auto v, auto l) { c.sigma = to_double(v, l); }},
      {"k", [](RunConfig& c, auto v, auto l) { c.k = to_double(v, l); }},
      {"n_parties", [](RunConfig& c, auto v, auto l) { c.n_parties = to_int<int>(v, l); }},
      {"tie_break",
       [](RunConfig& c, auto v, auto l) {
         try {
           c.tie_break = parse_tie_break(v);
         } catch (const InputError& e) {
           throw ParseError(e.what(), l);
         }
       }},
      {"tau", [](RunConfig& c, auto v, auto l) { c.tau = to_double(v, l); }},
      {"steps", [](RunConfig& c, auto v, auto l) { c.steps = to_int<long>(v, l); }},
      {"record_every", [](RunConfig& c, auto v, auto l) { c.record_every = to_int<long>(v, l); }},
      {"seed", [](RunConfig& c, auto v, auto l) { c.seed = to_int<std::uint64_t>(v, l); }},
      {"threads", [](RunConfig& c, auto v, auto l) { c.threads = to_int<int>(v, l); }},
      {"early_stop", [](RunConfig& c, auto v, auto l) { c.early_stop = to_bool(v, l); }},
      {"trajectory_file", [](RunConfig& c, auto v, auto) { c.trajectory_file = v; }},
      {"diagnostics_file", [](RunConfig& c, auto v, auto) { c.diagnostics_file = v; }},
      {"dataset_file", [](RunConfig& c, auto v, auto) { c.dataset_file = v; }},
      {"steps_per_period",
       [](RunConfig& c, auto v, auto l) { c.steps_per_period = to_int<long>(v, l); }},
      {"fit.k_min", [](RunConfig& c, auto v, auto l) { c.search.k_min = to_double(v, l); }},
      {"fit.k_max", [](RunConfig& c, auto v, auto l) { c.search.k_max = to_double(v, l); }},
      {"fit.sigma_min", [](RunConfig& c, auto v, auto l) { c.search.sigma_min = to_double(v, l); }},
      {"fit.sigma_max", [](RunConfig& c, auto v, auto l) { c.search.sigma_max = to_double(v, l); }},
      {"fit.grid_k", [](RunConfig& c, auto v, auto l) { c.search.grid_k = to_int<int>(v, l); }},
      {"fit.grid_sigma",
       [](RunConfig& c, auto v, auto l) { c.search.grid_sigma = to_int<int>(v, l); }},
      {"fit.max_evals",
       [](RunConfig& c, auto v, auto l) { c.search.max_evaluations = to_int<int>(v, l); }},
      {"fit.tolerance", [](RunConfig& c, auto v, auto l) { c.search.tolerance = to_double(v, l); }},
      {"fit.mode",
       [](RunConfig& c, auto v, auto l) {
         try {
           c.fit_mode = parse_fit_mode(v);
         } catch (const InputError& e) {
           throw ParseError(e.what(), l);
         }
       }},
      {"fit.init",
       [](RunConfig& c, auto v, auto l) {
         try {
           c.fit_init = parse_init_mode(v);
         } catch (const InputError& e) {
           throw ParseError(e.what(), l);
         }
       }},
      {"fit.resample_count",
       [](RunConfig& c, auto v, auto l) { c.resample_count = to_int<std::size_t>(v, l); }},
  };
  return keys;
}

void set_party_key(PartyInit& p, std::string_view field, std::string_view v, std::size_t l) {
  if (field == "dist") {
    try {
      p.distribution = parse_init_distribution(v);
    } catch (const InputError& e) {
      throw ParseError(e.what(), l);
    }
  } else if (field == "mean") {
    p.mean = to_double(v, l);
  } else if (field == "std") {
    p.std = to_double(v, l);
  } else if (field == "lo") {
    p.lo = to_double(v, l);
  } else if (field == "hi") {
    p.hi = to_double(v, l);
  } else if (field == "count") {
    p.count = to_int<std::size_t>(v, l);
  } else if (field == "positions") {
    p.positions.clear();
    for (auto item : detail::split(v, ',')) p.positions.push_back(to_double(item, l));
  } else {
    throw ParseError("unknown key 'party.<i>." + std::string(field) + "'", l);
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::map<int, PartyInit> parties;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) detail::strip_bom(line);
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = detail::trim(view.substr(0, eq));
    const auto value = detail::trim(view.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty()) throw ParseError("key '" + std::string(key) + "' has no value", line_no);
    if (!seen.emplace(key).second) throw ParseError("duplicate key '" + std::string(key) + "'", line_no);

    if (key.starts_with("party.")) {
      const auto rest = key.substr(6);
      const auto dot = rest.find('.');
      if (dot == std::string_view::npos) throw ParseError("malformed party key '" + std::string(key) + "'", line_no);
      const auto index = detail::parse_int<int>(rest.substr(0, dot));
      if (!index || *index < 1 || *index > kMaxConfigParties)
        throw ParseError("party index in '" + std::string(key) + "' must be 1.." +
                             std::to_string(kMaxConfigParties),
                         line_no);
      set_party_key(parties[*index], rest.substr(dot + 1), value, line_no);
      continue;
    }
    const auto& keys = global_keys();
    const auto it = keys.find(key);
    if (it == keys.end()) throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    it->second(cfg, value, line_no);
  }

  int expected = 1;
  for (auto& [index, p] : parties) {
    if (index != expected) throw InputError("party blocks must be numbered 1..n without gaps");
    cfg.parties.push_back(std::move(p));
    ++expected;
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_run_config(in);
}

ModelParams RunConfig::model_params() const {
  if (!sigma) throw InputError("config is missing 'sigma'");
  if (!k) throw InputError("config is missing 'k'");
  int n = n_parties.value_or(parties.empty() ? 2 : static_cast<int>(parties.size()));
  if (!parties.empty() && n != static_cast<int>(parties.size()))
    throw InputError("n_parties = " + std::to_string(n) + " but " + std::to_string(parties.size()) +
                     " party blocks are configured");
  return ModelParams(sigma0, *sigma, *k, n, tie_break);
}

InitSpec RunConfig::init_spec() const {
  if (parties.empty()) throw InputError("config defines no party.<i> initial distributions");
  return InitSpec{parties, seed};
}

SimulationOptions RunConfig::simulation_options() const {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (steps < 0) throw InputError("steps must be non-negative");
  if (record_every < 1) throw InputError("record_every must be >= 1");
  if (threads < 1) throw InputError("threads must be >= 1");
  SimulationOptions o;
  o.tau = tau;
  o.steps = steps;
  o.record_every = record_every;
  o.threads = threads;
  o.early_stop = early_stop;
  return o;
}

SimConfig RunConfig::sim_config() const {
  if (!(sigma0 > 0.0)) throw InputError("sigma0 must be positive");
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (steps_per_period < 1) throw InputError("steps_per_period must be >= 1");
  if (threads < 1) throw InputError("threads must be >= 1");
  SimConfig c;
  c.sigma0 = sigma0;
  c.tau = tau;
  c.steps_per_period = steps_per_period;
  c.tie_break = tie_break;
  c.threads = threads;
  c.mode = fit_mode;
  c.init = fit_init;
  c.resample_count = resample_count;
  c.seed = seed;
  return c;
}

}  // namespace polarflow
