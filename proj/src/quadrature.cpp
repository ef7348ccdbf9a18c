#include "quadrature.hpp"

#include <cmath>
#include <numbers>

#include "polarflow/errors.hpp"

namespace polarflow::detail {

// Physicists' Gauss-Hermite nodes by Newton iteration on the normalised
// recurrence, started from the usual asymptotic guesses.
Rule gauss_hermite_normal(int n, double mean, double stddev) {
  if (n < 1) throw InputError("quadrature node count must be >= 1");
  constexpr double pim4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::sqrt(2.0) * stddev;
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mean + scale * x[i];
    rule.weights[i] = w[i] / std::sqrt(std::numbers::pi);
  }
  return rule;
}

Rule trapezoid_normal(int n, double mean, double stddev, double half_width) {
  if (n < 2) throw InputError("trapezoid rule needs at least 2 nodes");
  if (!(half_width > 0.0)) throw InputError("trapezoid half-width must be positive");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double lo = -half_width, h = 2.0 * half_width / (n - 1);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    const double t = lo + i * h;
    const double end = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    rule.nodes[i] = mean + stddev * t;
    rule.weights[i] = end * h * norm * std::exp(-0.5 * t * t);
  }
  return rule;
}

}  // namespace polarflow::detail
