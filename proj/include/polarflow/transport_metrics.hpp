#pragma once

#include <span>
#include <utility>

#include "polarflow/ensemble.hpp"

namespace polarflow {

struct DiagnosticSummary {
  double mean;
  double std;
  double second_moment;
  std::pair<double, double> support;
};

// Exact 1-D Wasserstein-2 distance between uniformly weighted point clouds.
// Equal sizes use the sorted pairing; unequal sizes integrate the squared
// difference of the two quantile functions over the merged cumulative grid.
double w2(std::span<const double> a, std::span<const double> b);
double w2(const ParticleEnsemble& a, const ParticleEnsemble& b);

// Root mean squared deviation of a from the point c.
double w2_to_dirac(std::span<const double> a, double c);
double w2_to_dirac(const ParticleEnsemble& a, double c);

DiagnosticSummary summarize(std::span<const double> a);
DiagnosticSummary summarize(const ParticleEnsemble& a);

}  // namespace polarflow
