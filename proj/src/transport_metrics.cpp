#include "polarflow/transport_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polarflow/errors.hpp"

namespace polarflow {

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  std::stable_sort(out.begin(), out.end());
  return out;
}

void require_nonempty(std::span<const double> x) {
  if (x.empty()) throw InputError("ensemble must contain at least one particle");
}

}  // namespace

ParticleEnsemble::ParticleEnsemble(std::vector<double> positions)
    : positions_(std::move(positions)) {
  if (positions_.empty()) throw InputError("ensemble must contain at least one particle");
  for (double y : positions_)
    if (!std::isfinite(y)) throw InputError("ensemble positions must be finite");
}

ParticleEnsemble ParticleEnsemble::dirac(double at, std::size_t count) {
  return ParticleEnsemble(std::vector<double>(count, at));
}

double w2(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a);
  require_nonempty(b);
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  if (sa.size() == sb.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) acc += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    return std::sqrt(acc / static_cast<double>(sa.size()));
  }
  // Walk both step quantile functions; breakpoints at i/n and j/m. Integer
  // cross-multiplication keeps the grid exact.
  const std::size_t n = sa.size(), m = sb.size();
  std::size_t i = 0, j = 0;
  std::size_t pos = 0;  // current cumulative weight in units of 1/(n m)
  double acc = 0.0;
  while (i < n && j < m) {
    const std::size_t next_a = (i + 1) * m;
    const std::size_t next_b = (j + 1) * n;
    const std::size_t next = std::min(next_a, next_b);
    const double d = sa[i] - sb[j];
    acc += static_cast<double>(next - pos) * d * d;
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return std::sqrt(acc / (static_cast<double>(n) * static_cast<double>(m)));
}

double w2(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  return w2(a.positions(), b.positions());
}

double w2_to_dirac(std::span<const double> a, double c) {
  require_nonempty(a);
  // Same summation order as the sorted coupling in w2().
  double acc = 0.0;
  for (double y : sorted_copy(a)) acc += (y - c) * (y - c);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double w2_to_dirac(const ParticleEnsemble& a, double c) { return w2_to_dirac(a.positions(), c); }

DiagnosticSummary summarize(std::span<const double> a) {
  require_nonempty(a);
  const double n = static_cast<double>(a.size());
  double mean = 0.0, second = 0.0;
  for (double y : a) {
    mean += y;
    second += y * y;
  }
  mean /= n;
  second /= n;
  double var = 0.0;
  for (double y : a) var += (y - mean) * (y - mean);
  var /= n;
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  return {mean, std::sqrt(var), second, {*lo, *hi}};
}

DiagnosticSummary summarize(const ParticleEnsemble& a) { return summarize(a.positions()); }

}  // namespace polarflow
