#include <doctest.h>

#include <cmath>

#include "polarflow/errors.hpp"
#include "polarflow/model_core.hpp"
#include "polarflow/point_flow.hpp"

using namespace polarflow;

namespace {
const ModelParams nominal(0.93, 0.6, 0.5);
}

TEST_CASE("critical ratio") {
  const double x = critical_ratio();
  CHECK(x == doctest::Approx(0.807).epsilon(5e-4 / 0.807));
  CHECK(x > 0.80);
  CHECK(x < 0.81);
  CHECK(std::abs(3 * std::pow(x, 6) + 5 * std::pow(x, 4) - 3 * x * x - 1) <= 1e-10);
  CHECK(3 * std::pow(0.80, 6) + 5 * std::pow(0.80, 4) - 3 * 0.64 - 1 < 0);
  CHECK(3 * std::pow(0.81, 6) + 5 * std::pow(0.81, 4) - 3 * 0.81 * 0.81 - 1 > 0);
}

TEST_CASE("polarized equilibrium") {
  const double y = polarized_equilibrium(nominal);
  CHECK(y == doctest::Approx(0.33398).epsilon(5e-5 / 0.334));
  CHECK(2 * y == doctest::Approx(0.668).epsilon(1e-3));
  CHECK_THROWS_AS(polarized_equilibrium(ModelParams(0.93, 0.8, 0.5)), RegimeError);
  CHECK_THROWS_AS(polarized_equilibrium(ModelParams(0.93, 1.0, 0.5)), RegimeError);
  CHECK_THROWS_AS(polarized_equilibrium(ModelParams(0.93, 0.6, 0.5, 3)), InputError);
}

TEST_CASE("classify equilibria, polarized regime") {
  const auto r = classify_equilibria(nominal);
  CHECK(r.regime == Regime::polarized);
  CHECK(r.ratio == doctest::Approx(0.6 / 0.93));
  REQUIRE(r.equilibria.size() == 3);
  CHECK(r.equilibria[0].state == PointState{0.0, 0.0});
  CHECK(r.equilibria[0].stability == Stability::unstable);
  const double y = polarized_equilibrium(nominal);
  CHECK(r.equilibria[1].state == PointState{y, -y});
  CHECK(r.equilibria[2].state == PointState{-y, y});
  CHECK(r.equilibria[1].stability == Stability::stable);
  CHECK(r.equilibria[2].stability == Stability::stable);
  CHECK(r.equilibria[1].eigenvalue_real_parts == r.equilibria[2].eigenvalue_real_parts);
}

TEST_CASE("classify equilibria, consensus regime") {
  const auto r = classify_equilibria(ModelParams(0.93, 1.0, 0.5));
  CHECK(r.regime == Regime::consensus);
  REQUIRE(r.equilibria.size() == 1);
  CHECK(r.equilibria[0].state == PointState{0.0, 0.0});
  CHECK(r.equilibria[0].stability == Stability::stable);
}

TEST_CASE("stability tags agree with long-run integration") {
  const double y = polarized_equilibrium(nominal);
  // Perturbed origin leaves the origin.
  const auto away = integrate_point_flow(PointState{-1e-3, 1e-3}, nominal, 0.05, 8000);
  CHECK(std::abs(away.states.back()[1] - y) <= 1e-4);
  // Perturbed stable point returns.
  const auto back = integrate_point_flow(PointState{y + 0.02, -y + 0.01}, nominal, 0.05, 2000);
  CHECK(std::abs(back.states.back()[0] - y) <= 1e-6);
  CHECK(std::abs(back.states.back()[1] + y) <= 1e-6);
}

TEST_CASE("point flow trajectories") {
  const double y = polarized_equilibrium(nominal);
  const auto t = integrate_point_flow(PointState{-0.25, 0.25}, nominal, 0.01, 20000);
  CHECK(t.times.size() == t.states.size());
  CHECK(t.states.size() == 20001);
  for (std::size_t i = 1; i < t.times.size(); ++i) REQUIRE(t.times[i] > t.times[i - 1]);
  CHECK(std::abs(t.states.back()[0] + y) <= 1e-4);
  CHECK(std::abs(t.states.back()[1] - y) <= 1e-4);

  const auto still = integrate_point_flow(PointState{0.0, 0.0}, nominal, 0.05, 100);
  for (const auto& s : still.states) CHECK(s == PointState{0.0, 0.0});

  const auto consensus = integrate_point_flow(PointState{-0.25, 0.25}, ModelParams(0.93, 1.0, 0.5), 0.1, 20000);
  CHECK(std::abs(consensus.states.back()[0]) <= 1e-6);
  CHECK(std::abs(consensus.states.back()[1]) <= 1e-6);
}

TEST_CASE("mirrored initial conditions give the mirrored trajectory") {
  const auto a = integrate_point_flow(PointState{-0.3, 0.1}, nominal, 0.05, 300);
  const auto b = integrate_point_flow(PointState{-0.1, 0.3}, nominal, 0.05, 300);
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i][0] == -b.states[i][1]);
    CHECK(a.states[i][1] == -b.states[i][0]);
  }
}

TEST_CASE("an Euler step does not decrease a party's own votes") {
  PointState s{-0.05, 0.4};
  for (int step = 0; step < 200; ++step) {
    const PointState next = point_euler_step(s, nominal, 0.01);
    for (int i = 0; i < 2; ++i) {
      auto own = std::vector<double>(s.positions().begin(), s.positions().end());
      own[i] = next[i];
      CHECK(expected_votes_point(PointState(own), nominal, i) >= expected_votes_point(s, nominal, i) - 1e-15);
    }
    s = next;
  }
}

TEST_CASE("step halving and integrators") {
  // First-order convergence, and agreement once both runs have settled.
  const double coarse = step_halving_error(PointState{-0.25, 0.25}, nominal, 0.02, 500);
  const double fine = step_halving_error(PointState{-0.25, 0.25}, nominal, 0.01, 1000);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.05));
  CHECK(step_halving_error(PointState{-0.25, 0.25}, nominal, 0.01, 10000) <= 1e-6);
  CHECK(step_halving_error(PointState{-0.25, 0.25}, nominal, 0.05, 400, Integrator::rk4) <= 1e-9);
  const auto e = integrate_point_flow(PointState{-0.25, 0.25}, nominal, 0.01, 500);
  const auto r = integrate_point_flow(PointState{-0.25, 0.25}, nominal, 0.01, 500, Integrator::rk4);
  CHECK(std::abs(e.states.back()[0] - r.states.back()[0]) <= 1e-3);
  CHECK_THROWS_AS(integrate_point_flow(PointState{0, 0}, nominal, 0.0, 10), InputError);
  CHECK_THROWS_AS(integrate_point_flow(PointState{0, 0}, nominal, 0.1, -1), InputError);
}

TEST_CASE("divergence names the step") {
  const ModelParams wild(0.93, 0.6, 1e200);
  try {
    integrate_point_flow(PointState{-0.25, 0.25}, wild, 1e300, 5);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("velocity jacobian is symmetric under party relabeling") {
  const auto j = velocity_jacobian(PointState{0.1, -0.2}, nominal);
  const auto m = velocity_jacobian(PointState{0.2, -0.1}, nominal);
  CHECK(j.size() == 4);
  CHECK(j[0] == doctest::Approx(m[3]).epsilon(1e-6));
  CHECK(j[3] == doctest::Approx(m[0]).epsilon(1e-6));
}
