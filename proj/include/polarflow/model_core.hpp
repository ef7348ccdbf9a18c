#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace polarflow {

// How a voter satisfied with several parties splits their vote.
//   exclusive: votes for i when satisfied with i alone, or with every party
//              (then uniformly at random). This is the two- and three-party
//              rule of the satisficing model.
//   uniform:   satisfied with a set S, picks uniformly within S.
//   automatic: exclusive for n <= 3, uniform otherwise.
// For two parties all three coincide.
enum class TieBreak : std::uint8_t { automatic, exclusive, uniform };

TieBreak parse_tie_break(std::string_view text);
std::string_view to_string(TieBreak rule);

class ModelParams {
 public:
  ModelParams(double sigma0, double sigma, double k, int n_parties = 2,
              TieBreak tie_break = TieBreak::automatic);

  double sigma0() const { return sigma0_; }
  double sigma() const { return sigma_; }
  double k() const { return k_; }
  int n_parties() const { return n_parties_; }
  TieBreak tie_break() const { return tie_break_; }
  // automatic resolved against n_parties.
  TieBreak effective_tie_break() const;

  ModelParams with_k(double k) const;
  ModelParams with_sigma(double sigma) const;

  // Coefficient of the monomial s_i * prod_{j in T} s_j in p_i, |T| = m.
  double monomial_coefficient(int m) const;

 private:
  double sigma0_;
  double sigma_;
  double k_;
  int n_parties_;
  TieBreak tie_break_;
};

// One ideology position per party.
class PointState {
 public:
  PointState() = default;
  explicit PointState(std::vector<double> positions);
  PointState(std::initializer_list<double> positions)
      : PointState(std::vector<double>(positions)) {}

  std::span<const double> positions() const { return positions_; }
  double operator[](std::size_t i) const { return positions_[i]; }
  std::size_t size() const { return positions_.size(); }
  bool operator==(const PointState&) const = default;

 private:
  std::vector<double> positions_;
};

enum class QuadratureScheme : std::uint8_t { gauss_hermite, trapezoid };

struct QuadratureSpec {
  int node_count = 64;
  QuadratureScheme scheme = QuadratureScheme::gauss_hermite;
  // Half-width of the trapezoid support in units of sigma0.
  double truncation = 8.0;
};

// Probability that a voter at distance d is satisfied: exp(-d^2 / (2 sigma^2)).
double satisficing(double d, double sigma);

// p_i(x | y), evaluated directly from the satisfaction events.
double vote_probability(double x, const PointState& positions,
                        const ModelParams& params, int party_index);

// Expected vote share of a party against a zero-mean Gaussian public, closed form.
double expected_votes_point(const PointState& positions,
                            const ModelParams& params, int party_index);

// d/dy_i of expected_votes_point for the party's own position y_i.
double grad_expected_votes(const PointState& positions,
                           const ModelParams& params, int party_index);

// Quadrature of the same integral, independent of the closed form.
// public_mean shifts the Gaussian public; used to check translation covariance.
double oracle_expected_votes(const PointState& positions,
                             const ModelParams& params, int party_index,
                             const QuadratureSpec& quad,
                             double public_mean = 0.0);

}  // namespace polarflow
