#pragma once

namespace polarflow::detail {

// Shared by the point and particle integrators so that a one-particle
// ensemble moves bit-for-bit like the point model.
inline double advance(double x, double tau, double k, double gradient) {
  return x + tau * k * gradient;
}

}  // namespace polarflow::detail
