#pragma once

#include <span>
#include <vector>

namespace polarflow {

// Uniformly weighted particle approximation of a party's ideology measure.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  // Throws InputError if empty or if any position is non-finite.
  explicit ParticleEnsemble(std::vector<double> positions);

  static ParticleEnsemble dirac(double at, std::size_t count);

  std::span<const double> positions() const { return positions_; }
  std::size_t size() const { return positions_.size(); }
  double operator[](std::size_t i) const { return positions_[i]; }
  bool operator==(const ParticleEnsemble&) const = default;

 private:
  std::vector<double> positions_;
};

}  // namespace polarflow
