#pragma once

#include <vector>

namespace polarflow::detail {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to one
};

// Nodes and weights integrating against N(mean, stddev^2).
Rule gauss_hermite_normal(int n, double mean, double stddev);
Rule trapezoid_normal(int n, double mean, double stddev, double half_width);

}  // namespace polarflow::detail
