#pragma once

// Gaussian product integrals behind the expected-vote functionals.
//
// For a set S of m party positions,
//   I(S) = int prod_{j in S} s(x - y_j) drho(x)
//        = sigma / sqrt(sigma^2 + m sigma0^2)
//          * exp(-sum_j (y_j - ybar)^2 / (2 sigma^2) - m ybar^2 / (2 (sigma^2 + m sigma0^2)))
// and V_i = sum over opponent subsets T of c_|T| * I(T + {i}).

#include <span>
#include <vector>

#include "polarflow/model_core.hpp"

namespace polarflow::detail {

class KernelTable {
 public:
  explicit KernelTable(const ModelParams& params);

  const ModelParams& params() const { return params_; }

  // I and dI/dy_0 for the set {ys[0], ys[1], ...}.
  double integral(std::span<const double> ys) const;
  double integral_grad(std::span<const double> ys) const;

  double single(double a) const;
  double single_grad(double a) const;
  double pair(double a, double b) const;
  double pair_grad(double a, double b) const;

  // Triple integral exponent is gamma*(a^2+b^2+c^2) + 2*beta*(ab+ac+bc).
  double triple_scale() const { return triple_scale_; }
  double triple_beta() const { return triple_beta_; }
  double triple_gamma() const { return triple_gamma_; }

 private:
  ModelParams params_;
  double inv_two_sigma2_;
  std::vector<double> scale_;      // indexed by m
  std::vector<double> mean_coef_;  // 1 / (sigma^2 + m sigma0^2)
  double single_scale_, single_coef_;
  double pair_scale_, pair_diff_coef_, pair_sum_coef_, pair_grad_sum_coef_;
  double triple_scale_, triple_beta_, triple_gamma_;
};

// Per-particle mean over all opponent particle tuples of V_i and dV_i/dy_i.
struct PartyField {
  std::vector<double> value;
  std::vector<double> grad;
};

PartyField party_field(const KernelTable& table,
                       std::span<const std::span<const double>> parties,
                       int party_index, bool want_value, int threads);

// Mean over (b, c) of I(a, b, c) and dI/da for every a, by factoring the
// coupling. Outputs are resized to a.size().
void triple_means(const KernelTable& table, std::span<const double> a,
                  std::span<const double> b, std::span<const double> c,
                  std::span<double> value_out, std::span<double> grad_out);

}  // namespace polarflow::detail
