#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "esoform/errors.hpp"
#include "esoform/graph.hpp"
#include "esoform/riccati.hpp"
#include "oracles.hpp"

using namespace esoform;

TEST(Are, DoubleIntegratorClosedForm) {
  const auto p = solve_are({0.0, 0.0, 3});
  EXPECT_NEAR(p(0, 0), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(p(0, 1), 1.0, 1e-14);
  EXPECT_NEAR(p(1, 0), 1.0, 1e-14);
  EXPECT_NEAR(p(1, 1), std::sqrt(3.0), 1e-14);
}

TEST(Are, WeakRestoringForce) {
  const PlantParams plant{-0.01, 0.0, 3};
  const auto p = solve_are(plant);
  EXPECT_NEAR(p(0, 0), 1.72638293, 1e-7);
  EXPECT_NEAR(p(0, 1), 0.99005, 1e-5);
  EXPECT_NEAR(p(1, 1), 1.72629661, 1e-7);
  EXPECT_LT(are_residual(p, plant), 1e-12);
}

TEST(Are, MatchesHamiltonianOracle) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const PlantParams plant{coef(rng), coef(rng), 2};
    const auto p = solve_are(plant);
    const auto ref = oracle::hamiltonian_are(plant);
    EXPECT_LT((p - ref).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, ref.norm()))
        << plant.alpha_p << " " << plant.alpha_v;
    EXPECT_LT(are_residual(p, plant), 1e-10 * std::max(1.0, p.squaredNorm()));
    EXPECT_GT(p(0, 0), 0.0);
    EXPECT_GT(p.determinant(), 0.0);
    EXPECT_EQ(p(0, 1), p(1, 0));
  }
}

TEST(Gain, ScalesInverselyWithLambda2) {
  const auto p = solve_are({-0.01, 0.0, 3});
  const auto g1 = gain(p, 1.0);
  EXPECT_DOUBLE_EQ(g1.k_p, p(1, 0));
  EXPECT_DOUBLE_EQ(g1.k_v, p(1, 1));
  const auto g2 = gain(p, 2.0);
  EXPECT_DOUBLE_EQ(g2.k_p, 0.5 * g1.k_p);
  EXPECT_DOUBLE_EQ(g2.k_v, 0.5 * g1.k_v);
}

TEST(Gain, ReferenceScenarioValue) {
  const auto g = synthesize({-0.01, 0.0, 3}, 0.9293).gain;
  EXPECT_NEAR(g.k_p, 1.0654, 1e-3);
  EXPECT_NEAR(g.k_v, 1.8576, 1e-3);
}

TEST(Gain, FullMatrixIsKronecker) {
  const GainRow g{1.5, 2.5};
  const auto k = g.full(3);
  ASSERT_EQ(k.rows(), 3);
  ASSERT_EQ(k.cols(), 6);
  for (int d = 0; d < 3; ++d) {
    for (int c = 0; c < 6; ++c) {
      const double expected = c == d ? 1.5 : (c == d + 3 ? 2.5 : 0.0);
      EXPECT_EQ(k(d, c), expected);
    }
  }
}

TEST(Gain, RejectsNonPositiveLambda2) {
  const auto p = solve_are({0.0, 0.0, 1});
  EXPECT_THROW((void)gain(p, 0.0), InvalidLambda2);
  EXPECT_THROW((void)gain(p, -0.5), InvalidLambda2);
}

TEST(Hurwitz, ReferenceModes) {
  const PlantParams plant{-0.01, 0.0, 3};
  const auto g = synthesize(plant, 0.9293).gain;
  const auto m = verify_hurwitz(plant, g, {{0.9293, 0.0}, {1.5, 0.8}, {1.5, -0.8}, {3.0, 0.0}});
  for (const auto& x : m) EXPECT_LT(x.max_real_part, 0.0);
}

// Routh-Hurwitz for s^2 + lam k_v s + (lam k_p - a_p) with alpha_v = 0 and real lam:
// stable iff lam k_v > 0 and lam k_p > a_p.
TEST(Hurwitz, RealAxisSweepMatchesRouth) {
  for (double a_p : {-0.01, 0.01, 0.5}) {
    const PlantParams plant{a_p, 0.0, 1};
    const auto g = synthesize(plant, 0.9293).gain;
    const double threshold = std::max(0.0, a_p / g.k_p);
    for (int k = -160; k <= 2400; ++k) {
      const double lam = k * 0.00125;
      if (std::abs(lam - threshold) < 1e-6 || std::abs(lam) < 1e-6) continue;
      const bool routh = lam * g.k_v > 0.0 && lam * g.k_p - a_p > 0.0;
      const auto m = hurwitz_margins(plant, g, {{lam, 0.0}});
      EXPECT_EQ(m[0].stable(), routh) << "a_p=" << a_p << " lambda=" << lam;
    }
  }
}

TEST(Hurwitz, UnstableModeThrows) {
  const PlantParams plant{-0.01, 0.0, 1};
  const auto g = synthesize(plant, 1.0).gain;
  EXPECT_THROW(verify_hurwitz(plant, g, {{1.0, 0.0}, {-0.5, 0.0}}), NotHurwitz);
}

TEST(HurwitzProperty, RandomSpanningDigraphs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  const Eigen::Vector2d b(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 9;
    const PlantParams plant{coef(rng), coef(rng), 1};
    const auto s = spectrum(build_laplacian(Digraph(oracle::random_spanning_digraph(n, rng))));
    const auto sol = synthesize(plant, s.lambda2_re);
    const std::vector<std::complex<double>> modes(s.eigenvalues.begin() + 1, s.eigenvalues.end());
    for (const auto& m : hurwitz_margins(plant, sol.gain, modes)) {
      EXPECT_LT(m.max_real_part, 0.0) << "trial " << trial;
    }
    // Lyapunov certificate: (1 - 2 Re(lam_k) / Re(lam_2)) P B B^T P - I < 0.
    for (const auto& lam : modes) {
      const Eigen::Matrix2d q = (1.0 - 2.0 * lam.real() / s.lambda2_re) * sol.p_hat * b *
                                    b.transpose() * sol.p_hat -
                                Eigen::Matrix2d::Identity();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q);
      EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
    }
  }
}
