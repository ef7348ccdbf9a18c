#include "polarflow/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "polarflow/ensemble_flow.hpp"
#include "polarflow/errors.hpp"
#include "polarflow/point_flow.hpp"
#include "polarflow/transport_metrics.hpp"
#include "text_util.hpp"

namespace polarflow {

namespace {

bool label_less(const std::string& a, const std::string& b) {
  const auto ia = detail::parse_int<long long>(a);
  const auto ib = detail::parse_int<long long>(b);
  if (ia && ib) return *ia < *ib;
  if (ia != ib) return ia.has_value();  // numeric labels first
  return a < b;
}

std::string fmt_params(double k, double sigma) {
  return "k=" + std::to_string(k) + ", sigma=" + std::to_string(sigma);
}

std::vector<ParticleEnsemble> initial_ensembles(const ObservedTrajectory& observed,
                                                const SimConfig& config) {
  if (config.init == InitMode::observed) return observed.ensembles.front();
  InitSpec spec;
  spec.seed = config.seed;
  for (const auto& e : observed.ensembles.front()) {
    const auto summary = summarize(e);
    PartyInit p;
    p.count = config.resample_count;
    p.mean = summary.mean;
    p.std = summary.std;
    p.distribution = summary.std > 0.0 ? InitDistribution::gaussian : InitDistribution::dirac;
    spec.parties.push_back(p);
  }
  return sample_initial(spec);
}

void check_observed(const ObservedTrajectory& observed) {
  if (observed.periods.size() < 2)
    throw FitError("calibration needs at least 2 periods, got " +
                   std::to_string(observed.periods.size()));
  if (observed.parties.size() < 2) throw FitError("calibration needs at least 2 parties");
}

}  // namespace

ObservedTrajectory parse_observed(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  int col_period = -1, col_party = -1, col_score = -1;
  std::size_t columns = 0;
  std::map<long, std::map<std::string, std::vector<double>>> rows;
  std::vector<std::string> labels;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) detail::strip_bom(line);
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (columns == 0) {
      columns = fields.size();
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (fields[c] == "period") col_period = static_cast<int>(c);
        else if (fields[c] == "party") col_party = static_cast<int>(c);
        else if (fields[c] == "score") col_score = static_cast<int>(c);
        else throw ParseError("unexpected column '" + std::string(fields[c]) + "'", line_no);
      }
      if (col_period < 0 || col_party < 0 || col_score < 0)
        throw ParseError("header must name the columns period, party, score", line_no);
      continue;
    }
    if (fields.size() != columns)
      throw ParseError("expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    const auto period = detail::parse_int<long>(fields[col_period]);
    if (!period) throw ParseError("period '" + std::string(fields[col_period]) + "' is not an integer", line_no);
    const std::string party(fields[col_party]);
    if (party.empty()) throw ParseError("empty party label", line_no);
    const auto score = detail::parse_double(fields[col_score]);
    if (!score || !std::isfinite(*score))
      throw ParseError("score '" + std::string(fields[col_score]) + "' is not a finite number", line_no);
    rows[*period][party].push_back(*score);
    if (std::find(labels.begin(), labels.end(), party) == labels.end()) labels.push_back(party);
  }
  if (columns == 0) throw ParseError("missing header row", 0);
  if (rows.empty()) throw InputError("data file has no rows");

  std::sort(labels.begin(), labels.end(), label_less);
  ObservedTrajectory out;
  out.parties = labels;
  for (auto& [period, by_party] : rows) {
    out.periods.push_back(period);
    std::vector<ParticleEnsemble> row;
    for (const auto& label : labels) {
      auto it = by_party.find(label);
      if (it == by_party.end())
        throw InputError("period " + std::to_string(period) + " has no rows for party '" + label + "'");
      // Row order within a (period, party) group must not matter.
      std::sort(it->second.begin(), it->second.end());
      row.emplace_back(std::move(it->second));
    }
    out.ensembles.push_back(std::move(row));
  }
  return out;
}

ObservedTrajectory load_observed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path.string());
  return parse_observed(in);
}

FitMode parse_fit_mode(std::string_view text) {
  if (text == "distribution") return FitMode::distribution;
  if (text == "point-means") return FitMode::point_means;
  throw InputError("unknown fit mode '" + std::string(text) + "' (expected distribution or point-means)");
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "observed") return InitMode::observed;
  if (text == "gaussian") return InitMode::gaussian;
  throw InputError("unknown init mode '" + std::string(text) + "' (expected observed or gaussian)");
}

std::vector<std::vector<ParticleEnsemble>> predict(double k, double sigma,
                                                   const ObservedTrajectory& observed,
                                                   const SimConfig& config) {
  check_observed(observed);
  if (config.steps_per_period < 1) throw InputError("steps_per_period must be >= 1");
  const ModelParams params(config.sigma0, sigma, k, static_cast<int>(observed.parties.size()),
                           config.tie_break);
  const long periods = static_cast<long>(observed.periods.size());
  std::vector<std::vector<ParticleEnsemble>> out;

  try {
    if (config.mode == FitMode::point_means) {
      std::vector<double> start;
      for (const auto& e : observed.ensembles.front()) start.push_back(summarize(e).mean);
      const auto traj = integrate_point_flow(PointState(std::move(start)), params, config.tau,
                                             (periods - 1) * config.steps_per_period);
      for (long t = 0; t < periods; ++t) {
        std::vector<ParticleEnsemble> row;
        for (double y : traj.states[t * config.steps_per_period].positions())
          row.push_back(ParticleEnsemble::dirac(y, 1));
        out.push_back(std::move(row));
      }
      return out;
    }
    SimulationOptions options;
    options.tau = config.tau;
    options.steps = (periods - 1) * config.steps_per_period;
    options.record_every = config.steps_per_period;
    options.threads = config.threads;
    options.early_stop = false;
    options.with_diagnostics = false;
    auto traj = simulate(initial_ensembles(observed, config), params, options);
    return std::move(traj.snapshots);
  } catch (const DivergenceError& e) {
    throw DivergenceError(std::string(e.what()) + " [" + fmt_params(k, sigma) + "]", e.step());
  }
}

double objective(double k, double sigma, const ObservedTrajectory& observed,
                 const SimConfig& config) {
  const auto simulated = predict(k, sigma, observed, config);
  const std::size_t horizon = observed.periods.size() - 1;
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t i = 0; i < observed.parties.size(); ++i) {
      double d;
      if (config.mode == FitMode::point_means)
        d = summarize(observed.ensembles[t][i]).mean - simulated[t][i][0];
      else
        d = w2(observed.ensembles[t][i], simulated[t][i]);
      total += d * d;
    }
  }
  return total / static_cast<double>(horizon);
}

FitResult fit(const ObservedTrajectory& observed, const SimConfig& config,
              const SearchSpec& search) {
  check_observed(observed);
  auto positive_box = [](double lo, double hi, const char* name) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
      throw InputError(std::string("invalid search bounds for ") + name);
  };
  positive_box(search.k_min, search.k_max, "k");
  positive_box(search.sigma_min, search.sigma_max, "sigma");
  if (search.grid_k < 1 || search.grid_sigma < 1) throw InputError("grid sizes must be >= 1");

  FitResult result;
  const double lk_lo = std::log(search.k_min), lk_hi = std::log(search.k_max);
  const double ls_lo = std::log(search.sigma_min), ls_hi = std::log(search.sigma_max);

  auto to_k = [&](double x) { return std::clamp(std::exp(x), search.k_min, search.k_max); };
  auto to_sigma = [&](double x) {
    return std::clamp(std::exp(x), search.sigma_min, search.sigma_max);
  };
  auto evaluate = [&](double k, double sigma) {
    ++result.evaluations;
    try {
      return objective(k, sigma, observed, config);
    } catch (const Error& e) {
      result.failures.push_back({k, sigma, e.what()});
      return std::numeric_limits<double>::infinity();
    }
  };
  auto grid_axis = [](double lo, double hi, int count, int i) {
    return count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
  };

  // Stage 1: logarithmic grid.
  double best = std::numeric_limits<double>::infinity();
  double best_x = 0.5 * (lk_lo + lk_hi), best_y = 0.5 * (ls_lo + ls_hi);
  for (int i = 0; i < search.grid_k; ++i) {
    for (int j = 0; j < search.grid_sigma; ++j) {
      const double x = grid_axis(lk_lo, lk_hi, search.grid_k, i);
      const double y = grid_axis(ls_lo, ls_hi, search.grid_sigma, j);
      const double f = evaluate(to_k(x), to_sigma(y));
      result.grid.push_back({to_k(x), to_sigma(y), f});
      if (f < best) {
        best = f;
        best_x = x;
        best_y = y;
      }
    }
  }
  if (!std::isfinite(best)) {
    std::string msg = "every grid evaluation failed:";
    for (const auto& f : result.failures) msg += "\n  " + fmt_params(f.k, f.sigma) + ": " + f.message;
    throw FitError(msg);
  }

  // Stage 2: Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
  struct Vertex {
    double x, y, f;
  };
  auto project = [&](double x, double y) {
    return std::pair{std::clamp(x, lk_lo, lk_hi), std::clamp(y, ls_lo, ls_hi)};
  };
  auto make = [&](double x, double y) {
    const auto [px, py] = project(x, y);
    return Vertex{px, py, evaluate(to_k(px), to_sigma(py))};
  };
  const double hx = search.grid_k > 1 ? 0.5 * (lk_hi - lk_lo) / (search.grid_k - 1) : 0.1;
  const double hy = search.grid_sigma > 1 ? 0.5 * (ls_hi - ls_lo) / (search.grid_sigma - 1) : 0.1;
  // Step inwards when the best grid point sits on the upper bound.
  const double sx = best_x + hx <= lk_hi ? hx : -hx;
  const double sy = best_y + hy <= ls_hi ? hy : -hy;
  std::array<Vertex, 3> simplex{Vertex{best_x, best_y, best}, make(best_x + sx, best_y),
                                make(best_x, best_y + sy)};
  const int budget_end = result.evaluations + search.max_evaluations;

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (true) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    const double spread = simplex[2].f - simplex[0].f;
    if (spread < search.tolerance) {
      result.converged = true;
      break;
    }
    const double size = std::max({std::abs(simplex[1].x - simplex[0].x),
                                  std::abs(simplex[2].x - simplex[0].x),
                                  std::abs(simplex[1].y - simplex[0].y),
                                  std::abs(simplex[2].y - simplex[0].y)});
    if (size < 1e-13 || result.evaluations >= budget_end) break;

    const double cx = 0.5 * (simplex[0].x + simplex[1].x);
    const double cy = 0.5 * (simplex[0].y + simplex[1].y);
    const Vertex& worst = simplex[2];
    const Vertex r = make(cx + (cx - worst.x), cy + (cy - worst.y));
    if (r.f < simplex[0].f) {
      const Vertex e = make(cx + 2.0 * (r.x - cx), cy + 2.0 * (r.y - cy));
      simplex[2] = e.f < r.f ? e : r;
      continue;
    }
    if (r.f < simplex[1].f) {
      simplex[2] = r;
      continue;
    }
    if (r.f < worst.f) {
      const Vertex oc = make(cx + 0.5 * (r.x - cx), cy + 0.5 * (r.y - cy));
      if (oc.f <= r.f) {
        simplex[2] = oc;
        continue;
      }
    } else {
      const Vertex ic = make(cx + 0.5 * (worst.x - cx), cy + 0.5 * (worst.y - cy));
      if (ic.f < worst.f) {
        simplex[2] = ic;
        continue;
      }
    }
    for (int v = 1; v < 3; ++v)
      simplex[v] = make(simplex[0].x + 0.5 * (simplex[v].x - simplex[0].x),
                        simplex[0].y + 0.5 * (simplex[v].y - simplex[0].y));
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  result.k = to_k(simplex[0].x);
  result.sigma = to_sigma(simplex[0].y);
  result.objective = simplex[0].f;
  return result;
}

}  // namespace polarflow
