#include "polarflow/point_flow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "flow_step.hpp"
#include "kernels.hpp"
#include "polarflow/errors.hpp"

namespace polarflow {

namespace {

constexpr double kInconclusiveBand = 1e-8;

double critical_polynomial(double x) {
  const double x2 = x * x;
  return ((3.0 * x2 + 5.0) * x2 - 3.0) * x2 - 1.0;
}

Equilibrium make_equilibrium(PointState state, const ModelParams& params) {
  const std::size_t n = state.size();
  const std::vector<double> jac = velocity_jacobian(state, params);
  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = jac[r * n + c];
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  std::vector<double> re(n);
  for (std::size_t i = 0; i < n; ++i) re[i] = eig[i].real();
  std::sort(re.begin(), re.end());

  Stability tag = Stability::stable;
  for (double r : re) {
    if (r > kInconclusiveBand) {
      tag = Stability::unstable;
      break;
    }
    if (r >= -kInconclusiveBand) tag = Stability::inconclusive;
  }
  return {std::move(state), tag, std::move(re)};
}

void check_finite(const std::vector<double>& s, long step) {
  for (double y : s)
    if (!std::isfinite(y)) throw DivergenceError("point flow produced a non-finite state", step);
}

std::vector<double> euler_raw(const PointState& state, const ModelParams& params, double dt) {
  const int n = params.n_parties();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = detail::advance(state[i], dt, params.k(), grad_expected_votes(state, params, i));
  return out;
}

std::vector<double> rk4_raw(const PointState& y, const ModelParams& params, double dt) {
  const std::size_t n = y.size();
  auto shifted = [&](const std::vector<double>& v, double f) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + f * v[i];
    return PointState(std::move(out));
  };
  const auto k1 = point_velocity(y, params);
  const auto k2 = point_velocity(shifted(k1, 0.5 * dt), params);
  const auto k3 = point_velocity(shifted(k2, 0.5 * dt), params);
  const auto k4 = point_velocity(shifted(k3, dt), params);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(Regime r) {
  return r == Regime::polarized ? "polarized" : "consensus";
}

double critical_ratio() {
  double lo = 0.0, hi = 2.0;  // p(0) = -1, p(2) > 0
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (critical_polynomial(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double polarized_equilibrium(const ModelParams& params) {
  if (params.n_parties() != 2) throw InputError("the polarized equilibrium is defined for two parties");
  const double s2 = params.sigma() * params.sigma();
  const double s02 = params.sigma0() * params.sigma0();
  const double ratio = params.sigma() / params.sigma0();
  const double arg = std::pow(s2 + s02, 3) / (4.0 * s2 * s2 * (s2 + 2.0 * s02));
  if (!(arg > 1.0) || ratio >= critical_ratio())
    throw RegimeError("no polarized equilibrium: sigma/sigma0 = " + std::to_string(ratio) +
                      " is not below the critical ratio " + std::to_string(critical_ratio()) +
                      "; the consensus equilibrium (0, 0) applies");
  return params.sigma() * std::sqrt((s2 + s02) / (s2 + 2.0 * s02) * std::log(arg));
}

std::vector<double> point_velocity(const PointState& state, const ModelParams& params) {
  const int n = params.n_parties();
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = params.k() * grad_expected_votes(state, params, i);
  return v;
}

std::vector<double> velocity_jacobian(const PointState& state, const ModelParams& params,
                                      double h) {
  const std::size_t n = state.size();
  std::vector<double> jac(n * n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> plus(state.positions().begin(), state.positions().end());
    std::vector<double> minus = plus;
    plus[c] += h;
    minus[c] -= h;
    const auto vp = point_velocity(PointState(std::move(plus)), params);
    const auto vm = point_velocity(PointState(std::move(minus)), params);
    for (std::size_t r = 0; r < n; ++r) jac[r * n + c] = (vp[r] - vm[r]) / (2.0 * h);
  }
  return jac;
}

EquilibriumReport classify_equilibria(const ModelParams& params) {
  if (params.n_parties() != 2)
    throw InputError("equilibrium classification is defined for two parties");
  EquilibriumReport report;
  report.critical_ratio = critical_ratio();
  report.ratio = params.sigma() / params.sigma0();
  report.regime = report.ratio < report.critical_ratio ? Regime::polarized : Regime::consensus;
  report.equilibria.push_back(make_equilibrium(PointState{0.0, 0.0}, params));
  if (report.regime == Regime::polarized) {
    const double y = polarized_equilibrium(params);
    report.equilibria.push_back(make_equilibrium(PointState{y, -y}, params));
    report.equilibria.push_back(make_equilibrium(PointState{-y, y}, params));
  }
  return report;
}

PointState point_euler_step(const PointState& state, const ModelParams& params, double dt) {
  auto next = euler_raw(state, params, dt);
  check_finite(next, 1);
  return PointState(std::move(next));
}

PointTrajectory integrate_point_flow(const PointState& initial, const ModelParams& params,
                                     double dt, long steps, Integrator integrator) {
  if (!std::isfinite(dt) || !(dt > 0.0)) throw InputError("dt must be positive");
  if (steps < 0) throw InputError("steps must be non-negative");
  if (initial.size() != static_cast<std::size_t>(params.n_parties()))
    throw InputError("initial state size does not match n_parties");
  PointTrajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  for (long s = 1; s <= steps; ++s) {
    const PointState& prev = traj.states.back();
    std::vector<double> next;
    try {
      next = integrator == Integrator::euler ? euler_raw(prev, params, dt)
                                             : rk4_raw(prev, params, dt);
    } catch (const InputError&) {
      // an RK4 stage left the finite range
      throw DivergenceError("point flow produced a non-finite state", s);
    }
    check_finite(next, s);
    traj.times.push_back(static_cast<double>(s) * dt);
    traj.states.emplace_back(std::move(next));
  }
  return traj;
}

double step_halving_error(const PointState& initial, const ModelParams& params, double dt,
                          long steps, Integrator integrator) {
  const auto coarse = integrate_point_flow(initial, params, dt, steps, integrator);
  const auto fine = integrate_point_flow(initial, params, 0.5 * dt, 2 * steps, integrator);
  double err = 0.0;
  for (std::size_t i = 0; i < initial.size(); ++i)
    err = std::max(err, std::abs(coarse.states.back()[i] - fine.states.back()[i]));
  return err;
}

}  // namespace polarflow
