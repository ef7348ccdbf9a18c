#include "polarflow/model_core.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "kernels.hpp"
#include "polarflow/errors.hpp"
#include "quadrature.hpp"

namespace polarflow {

namespace {

constexpr int kMaxParties = 16;

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0))
    throw InputError(std::string(name) + " must be a positive finite number");
}

void check_state(const PointState& positions, const ModelParams& params, int party_index) {
  if (positions.size() != static_cast<std::size_t>(params.n_parties()))
    throw InputError("state has " + std::to_string(positions.size()) +
                     " positions, model has " + std::to_string(params.n_parties()) +
                     " parties");
  if (party_index < 0 || party_index >= params.n_parties())
    throw InputError("party index " + std::to_string(party_index) + " out of range");
}

template <class Term>
double sum_over_subsets(const PointState& positions, const ModelParams& params,
                        int party_index, Term term) {
  const int n = params.n_parties();
  std::vector<double> ys;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    const double coef = params.monomial_coefficient(std::popcount(mask));
    if (coef == 0.0) continue;
    ys.assign(1, positions[party_index]);
    int bit = 0;
    for (int j = 0; j < n; ++j) {
      if (j == party_index) continue;
      if (mask & (1u << bit)) ys.push_back(positions[j]);
      ++bit;
    }
    total += coef * term(ys);
  }
  return total;
}

}  // namespace

TieBreak parse_tie_break(std::string_view text) {
  if (text == "auto") return TieBreak::automatic;
  if (text == "exclusive") return TieBreak::exclusive;
  if (text == "uniform") return TieBreak::uniform;
  throw InputError("unknown tie-break rule '" + std::string(text) +
                   "' (expected auto, exclusive or uniform)");
}

std::string_view to_string(TieBreak rule) {
  switch (rule) {
    case TieBreak::automatic: return "auto";
    case TieBreak::exclusive: return "exclusive";
    case TieBreak::uniform: return "uniform";
  }
  return "auto";
}

ModelParams::ModelParams(double sigma0, double sigma, double k, int n_parties,
                         TieBreak tie_break)
    : sigma0_(sigma0), sigma_(sigma), k_(k), n_parties_(n_parties), tie_break_(tie_break) {
  require_positive(sigma0, "sigma0");
  require_positive(sigma, "sigma");
  require_positive(k, "k");
  if (n_parties < 2 || n_parties > kMaxParties)
    throw InputError("n_parties must be between 2 and " + std::to_string(kMaxParties));
}

TieBreak ModelParams::effective_tie_break() const {
  if (tie_break_ != TieBreak::automatic) return tie_break_;
  return n_parties_ <= 3 ? TieBreak::exclusive : TieBreak::uniform;
}

ModelParams ModelParams::with_k(double k) const {
  return ModelParams(sigma0_, sigma_, k, n_parties_, tie_break_);
}

ModelParams ModelParams::with_sigma(double sigma) const {
  return ModelParams(sigma0_, sigma, k_, n_parties_, tie_break_);
}

double ModelParams::monomial_coefficient(int m) const {
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (effective_tie_break() == TieBreak::uniform) return sign / (m + 1);
  // s_i prod(1 - s_j) expands to sum_T (-1)^|T| s_i s_T; the all-satisfied
  // event adds 1/n to the full monomial.
  return sign + (m == n_parties_ - 1 ? 1.0 / n_parties_ : 0.0);
}

PointState::PointState(std::vector<double> positions) : positions_(std::move(positions)) {
  for (double y : positions_)
    if (!std::isfinite(y)) throw InputError("positions must be finite");
}

double satisficing(double d, double sigma) {
  if (!std::isfinite(d) || d < 0.0) throw InputError("distance must be finite and non-negative");
  require_positive(sigma, "sigma");
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

double vote_probability(double x, const PointState& positions, const ModelParams& params,
                        int party_index) {
  check_state(positions, params, party_index);
  if (!std::isfinite(x)) throw InputError("voter position must be finite");
  const int n = params.n_parties();
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = satisficing(std::abs(x - positions[j]), params.sigma());

  if (params.effective_tie_break() == TieBreak::exclusive) {
    double alone = s[party_index], all = 1.0;
    for (int j = 0; j < n; ++j) {
      all *= s[j];
      if (j != party_index) alone *= 1.0 - s[j];
    }
    return alone + all / n;
  }
  // Sum over the set of other parties the voter is also satisfied with.
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    double event = s[party_index];
    int bit = 0;
    for (int j = 0; j < n; ++j) {
      if (j == party_index) continue;
      event *= (mask & (1u << bit)) ? s[j] : 1.0 - s[j];
      ++bit;
    }
    total += event / (std::popcount(mask) + 1);
  }
  return total;
}

double expected_votes_point(const PointState& positions, const ModelParams& params,
                            int party_index) {
  check_state(positions, params, party_index);
  const detail::KernelTable table(params);
  return sum_over_subsets(positions, params, party_index,
                          [&](std::span<const double> ys) { return table.integral(ys); });
}

double grad_expected_votes(const PointState& positions, const ModelParams& params,
                           int party_index) {
  check_state(positions, params, party_index);
  const detail::KernelTable table(params);
  return sum_over_subsets(positions, params, party_index,
                          [&](std::span<const double> ys) { return table.integral_grad(ys); });
}

double oracle_expected_votes(const PointState& positions, const ModelParams& params,
                             int party_index, const QuadratureSpec& quad,
                             double public_mean) {
  check_state(positions, params, party_index);
  if (quad.node_count < 32)
    throw InputError("oracle quadrature needs at least 32 nodes, got " +
                     std::to_string(quad.node_count));
  if (!std::isfinite(public_mean)) throw InputError("public mean must be finite");
  const detail::Rule rule =
      quad.scheme == QuadratureScheme::gauss_hermite
          ? detail::gauss_hermite_normal(quad.node_count, public_mean, params.sigma0())
          : detail::trapezoid_normal(quad.node_count, public_mean, params.sigma0(),
                                     quad.truncation);
  double total = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    total += rule.weights[q] * vote_probability(rule.nodes[q], positions, params, party_index);
  return total;
}

}  // namespace polarflow
