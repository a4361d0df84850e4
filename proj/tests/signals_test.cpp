#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "esoform/errors.hpp"
#include "esoform/signals.hpp"

using namespace esoform;

namespace {
constexpr double kPi = std::numbers::pi;

FormationSpec hexagon() { return hexagon_formation(6, 3.0, kPi / 3.0); }
}  // namespace

TEST(Formation, HexagonFirstAgentAtZero) {
  const auto f = eval_formation(hexagon(), 0, 0.0);
  const double pos[] = {0.0, 3.0, 0.0};
  const double vel[] = {3.0, 0.0, -3.0};
  for (int d = 0; d < 3; ++d) {
    EXPECT_NEAR(f.position[d], pos[d], 1e-15);
    EXPECT_NEAR(f.velocity[d], vel[d], 1e-15);
  }
}

TEST(Formation, HexagonPhaseOffsets) {
  const auto spec = hexagon();
  for (int i = 0; i < 6; ++i) {
    const double phi = 0.7 + i * kPi / 3.0;
    const auto f = eval_formation(spec, i, 0.7);
    EXPECT_NEAR(f.position[0], 3.0 * std::sin(phi), 1e-13);
    EXPECT_NEAR(f.position[1], 3.0 * std::cos(phi), 1e-13);
    EXPECT_NEAR(f.position[2], -3.0 * std::sin(phi), 1e-13);
  }
}

TEST(Disturbance, KnownValues) {
  const auto w = biased_sine_disturbance(6);
  const auto w0 = eval_disturbance(w, 0, 0.0);
  EXPECT_NEAR(w0[0], 1.5, 1e-14);
  EXPECT_NEAR(w0[1], 2.5, 1e-14);
  EXPECT_NEAR(w0[2], 4.902113032590307, 1e-12);
  const auto w5 = eval_disturbance(w, 5, kPi / 2.0);
  EXPECT_NEAR(w5[0], 11.0, 1e-12);
  EXPECT_EQ(w.frequencies(), std::vector<double>{1.0});
}

TEST(Signals, ZeroPresets) {
  const auto f = eval_formation(zero_formation(3, 2), 2, 4.0);
  EXPECT_EQ(f.position.norm() + f.velocity.norm() + f.velocity_rate.norm(), 0.0);
  EXPECT_EQ(eval_disturbance(zero_disturbance(3, 2), 1, 1.0).norm(), 0.0);
  EXPECT_TRUE(zero_disturbance(3, 2).frequencies().empty());
}

TEST(Signals, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> amp(-5.0, 5.0), freq(0.0, 4.0),
      ph(-kPi, kPi), tt(-10.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    AxisSignal s;
    const int terms = 1 + trial % 3;
    for (int k = 0; k < terms; ++k) s.terms.push_back({amp(rng), freq(rng), ph(rng), amp(rng)});
    const double t = tt(rng);
    const double h = 1e-5;
    const double fd = (s.value(t + h) - s.value(t - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - s.derivative(t)));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Signals, FormationRatesAreAnalytic) {
  const auto spec = hexagon();
  const double h = 1e-5;
  for (int i = 0; i < 6; ++i) {
    const auto a = eval_formation(spec, i, 1.3 - h);
    const auto b = eval_formation(spec, i, 1.3 + h);
    const auto m = eval_formation(spec, i, 1.3);
    EXPECT_LT(((b.position - a.position) / (2 * h) - m.position_rate).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT(((b.velocity - a.velocity) / (2 * h) - m.velocity_rate).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Feasibility, HexagonIsConsistent) {
  const auto r = feasibility_residual(hexagon(), uniform_grid(0.0, 20.0, 0.01));
  EXPECT_LT(r.max_residual, 1e-12);
  EXPECT_EQ(r.per_agent.size(), 6u);
}

TEST(Feasibility, ZeroVelocityOffsetsAreRejected) {
  auto spec = hexagon();
  for (auto& a : spec.agents) {
    for (auto& v : a.velocity) v.terms.clear();
  }
  const auto r = feasibility_residual(spec, uniform_grid(0.0, 20.0, 0.01));
  EXPECT_NEAR(r.max_residual, 3.0, 1e-6);
}

TEST(Feasibility, SineWithoutVelocityHasUnitResidual) {
  FormationSpec spec;
  spec.n_axes = 1;
  spec.agents.resize(1);
  spec.agents[0].position = {AxisSignal{{{1.0, 1.0, 0.0, 0.0}}}};
  spec.agents[0].velocity = {AxisSignal{}};
  const auto r = feasibility_residual(spec, uniform_grid(0.0, 2.0 * kPi, 0.01));
  EXPECT_NEAR(r.max_residual, 1.0, 1e-12);
}

TEST(Feasibility, ConstantFormationIsExact) {
  const auto spec = static_hexagon_formation(6, 3.0, kPi / 3.0);
  EXPECT_EQ(feasibility_residual(spec, uniform_grid(0.0, 10.0, 0.1)).max_residual, 0.0);
}

TEST(FeasibilityProperty, DifferentiatedPositionsAreFeasible) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(-4.0, 4.0), freq(0.1, 3.0), ph(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    FormationSpec spec;
    spec.n_axes = 2;
    spec.agents.resize(3);
    for (auto& a : spec.agents) {
      for (int d = 0; d < 2; ++d) {
        AxisSignal p, v;
        for (int k = 0; k < 2; ++k) {
          const Sinusoid s{amp(rng), freq(rng), ph(rng), amp(rng)};
          p.terms.push_back(s);
          v.terms.push_back({s.amplitude * s.angular_frequency, s.angular_frequency,
                             s.phase + kPi / 2.0, 0.0});
        }
        a.position.push_back(p);
        a.velocity.push_back(v);
      }
    }
    EXPECT_LT(feasibility_residual(spec, uniform_grid(0.0, 10.0, 0.05)).max_residual, 1e-12);
  }
}

TEST(FeasibilityProperty, PeriodShiftInvariance) {
  auto spec = hexagon();
  for (auto& a : spec.agents) {
    for (auto& v : a.velocity) {
      for (auto& t : v.terms) t.amplitude *= 0.5;
    }
  }
  const auto r0 = feasibility_residual(spec, uniform_grid(0.0, 5.0, 0.01));
  const auto r1 = feasibility_residual(spec, uniform_grid(2.0 * kPi, 2.0 * kPi + 5.0, 0.01));
  EXPECT_NEAR(r0.max_residual, r1.max_residual, 1e-12);
}

TEST(Signals, ValidateRejectsAxisMismatch) {
  auto spec = hexagon();
  spec.agents[2].velocity.pop_back();
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(Signals, UniformGridEndpoints) {
  const auto g = uniform_grid(0.0, 1.0, 0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 1.0, 1e-12);
}
