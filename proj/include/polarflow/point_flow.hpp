#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "polarflow/model_core.hpp"

namespace polarflow {

enum class Stability : std::uint8_t { stable, unstable, inconclusive };
enum class Regime : std::uint8_t { polarized, consensus };
enum class Integrator : std::uint8_t { euler, rk4 };

std::string_view to_string(Stability s);
std::string_view to_string(Regime r);

struct Equilibrium {
  PointState state;
  Stability stability;
  std::vector<double> eigenvalue_real_parts;  // sorted ascending
};

struct EquilibriumReport {
  std::vector<Equilibrium> equilibria;
  double critical_ratio;
  double ratio;  // sigma / sigma0
  Regime regime;
};

struct PointTrajectory {
  std::vector<double> times;
  std::vector<PointState> states;
};

// Unique positive root of 3x^6 + 5x^4 - 3x^2 - 1.
double critical_ratio();

// y* > 0 of the mirrored polarized pair (y*, -y*). Throws RegimeError when
// sigma / sigma0 is not below the critical ratio.
double polarized_equilibrium(const ModelParams& params);

// Vector field k * dV_i/dy_i for every party.
std::vector<double> point_velocity(const PointState& state, const ModelParams& params);

// Central finite-difference Jacobian of point_velocity, row-major n x n.
std::vector<double> velocity_jacobian(const PointState& state, const ModelParams& params,
                                      double h = 1e-6);

// Two-party equilibria with numerically determined stability.
EquilibriumReport classify_equilibria(const ModelParams& params);

PointState point_euler_step(const PointState& state, const ModelParams& params, double dt);

PointTrajectory integrate_point_flow(const PointState& initial, const ModelParams& params,
                                     double dt, long steps,
                                     Integrator integrator = Integrator::euler);

// Max |difference| of the final state when integrating with dt versus dt/2
// (twice the steps).
double step_halving_error(const PointState& initial, const ModelParams& params, double dt,
                          long steps, Integrator integrator = Integrator::euler);

}  // namespace polarflow
