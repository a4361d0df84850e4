#include <gtest/gtest.h>

#include <random>

#include "esoform/errors.hpp"
#include "esoform/graph.hpp"
#include "oracles.hpp"

using namespace esoform;

namespace {

Eigen::MatrixXd cycle(int n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) w((i + 1) % n, i) = 1.0;
  return w;
}

}  // namespace

TEST(Laplacian, RowSumsMinusWeights) {
  Eigen::MatrixXd w(3, 3);
  w << 0, 2, 0,
       1, 0, 3,
       0, 0, 0;
  Eigen::MatrixXd expected(3, 3);
  expected << 2, -2, 0,
              -1, 4, -3,
              0, 0, 0;
  EXPECT_TRUE(build_laplacian(Digraph(w)).isApprox(expected));
}

TEST(Laplacian, RowsSumToZero) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = oracle::random_spanning_digraph(2 + trial % 9, rng);
    EXPECT_LT(build_laplacian(Digraph(w)).rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Digraph, RejectsBadWeights) {
  Eigen::MatrixXd neg = cycle(3);
  neg(0, 1) = -1.0;
  EXPECT_THROW(Digraph{neg}, InvalidArgument);
  Eigen::MatrixXd diag = cycle(3);
  diag(1, 1) = 1.0;
  EXPECT_THROW(Digraph{diag}, InvalidArgument);
  EXPECT_THROW(Digraph{Eigen::MatrixXd::Zero(1, 1)}, InvalidArgument);
  EXPECT_THROW(Digraph{Eigen::MatrixXd::Zero(2, 3)}, InvalidArgument);
}

TEST(Digraph, FromEdgesSetsReceiverRow) {
  const auto g = Digraph::from_edges(3, {{0, 1, 2.0}, {1, 2, 0.5}});
  EXPECT_EQ(g.weight(1, 0), 2.0);
  EXPECT_EQ(g.weight(2, 1), 0.5);
  EXPECT_EQ(g.weight(0, 1), 0.0);
}

TEST(SpanningTree, Examples) {
  EXPECT_TRUE(has_spanning_tree(Digraph(cycle(6))));

  Eigen::MatrixXd pairs = Eigen::MatrixXd::Zero(4, 4);
  pairs(0, 1) = pairs(1, 0) = pairs(2, 3) = pairs(3, 2) = 1.0;
  EXPECT_FALSE(has_spanning_tree(Digraph(pairs)));

  // Center listens to every leaf: no node reaches all others.
  Eigen::MatrixXd in_star = Eigen::MatrixXd::Zero(4, 4);
  in_star(0, 1) = in_star(0, 2) = in_star(0, 3) = 1.0;
  EXPECT_FALSE(has_spanning_tree(Digraph(in_star)));

  // Every leaf listens to the center.
  Eigen::MatrixXd out_star = Eigen::MatrixXd::Zero(4, 4);
  out_star(1, 0) = out_star(2, 0) = out_star(3, 0) = 1.0;
  EXPECT_TRUE(has_spanning_tree(Digraph(out_star)));
}

TEST(SpanningTree, ExhaustiveAgainstClosureUpToFourNodes) {
  for (int n = 2; n <= 4; ++n) {
    const int slots = n * (n - 1);
    for (long mask = 0; mask < (1L << slots); ++mask) {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
      int bit = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          if (mask & (1L << bit)) w(i, j) = 1.0;
          ++bit;
        }
      }
      ASSERT_EQ(has_spanning_tree(Digraph(w)), oracle::spanning_tree_by_closure(w))
          << "n=" << n << " mask=" << mask;
    }
  }
}

TEST(SpanningTree, SampledAgainstClosureFiveNodes) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> pick(0, (1L << 20) - 1);
  for (int trial = 0; trial < 3000; ++trial) {
    const long mask = pick(rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
    int bit = 0;
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i == j) continue;
        if (mask & (1L << bit)) w(i, j) = 1.0;
        ++bit;
      }
    }
    ASSERT_EQ(has_spanning_tree(Digraph(w)), oracle::spanning_tree_by_closure(w));
  }
}

TEST(Spectrum, DirectedFourCycle) {
  Eigen::MatrixXd l(4, 4);
  l << 1, -1, 0, 0,
       0, 1, -1, 0,
       0, 0, 1, -1,
       -1, 0, 0, 1;
  const auto s = spectrum(l);
  ASSERT_EQ(s.eigenvalues.size(), 4u);
  const std::complex<double> expected[] = {{0, 0}, {1, -1}, {1, 1}, {2, 0}};
  for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(s.eigenvalues[k] - expected[k]), 1e-9);
  EXPECT_NEAR(s.lambda2_re, 1.0, 1e-9);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.u_bar_1[k], 0.25, 1e-12);
}

TEST(Spectrum, CompleteGraph) {
  for (int n = 2; n <= 7; ++n) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
    w.diagonal().setZero();
    const auto s = spectrum(build_laplacian(Digraph(w)));
    EXPECT_LT(std::abs(s.eigenvalues[0]), 1e-9);
    for (int k = 1; k < n; ++k) EXPECT_LT(std::abs(s.eigenvalues[k] - double(n)), 1e-9);
    EXPECT_NEAR(s.lambda2_re, n, 1e-9);
    for (int k = 0; k < n; ++k) EXPECT_NEAR(s.u_bar_1[k], 1.0 / n, 1e-12);
  }
}

TEST(Spectrum, LeaderFollowerPair) {
  Eigen::MatrixXd l(2, 2);
  l << 1, -1,
       0, 0;
  const auto s = spectrum(l);
  EXPECT_NEAR(s.eigenvalues[0].real(), 0.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues[1].real(), 1.0, 1e-12);
  EXPECT_NEAR(s.u_bar_1[0], 0.0, 1e-12);
  EXPECT_NEAR(s.u_bar_1[1], 1.0, 1e-12);
}

TEST(Spectrum, DisconnectedThrows) {
  Eigen::MatrixXd pairs = Eigen::MatrixXd::Zero(4, 4);
  pairs(0, 1) = pairs(1, 0) = pairs(2, 3) = pairs(3, 2) = 1.0;
  EXPECT_THROW((void)spectrum(build_laplacian(Digraph(pairs))), NoSpanningTree);
}

TEST(SpectrumProperty, LeftNullVectorTraceAndScaling) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 19;
    const auto w = oracle::random_spanning_digraph(n, rng);
    const auto l = build_laplacian(Digraph(w));
    const auto s = spectrum(l);

    EXPECT_LT((s.u_bar_1 * l).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(s.u_bar_1.sum(), 1.0, 1e-12);
    std::complex<double> sum = 0.0;
    for (const auto& e : s.eigenvalues) sum += e;
    EXPECT_NEAR(sum.real(), l.trace(), 1e-9 * std::max(1.0, l.trace()));
    EXPECT_NEAR(sum.imag(), 0.0, 1e-9 * std::max(1.0, l.trace()));
    for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
      EXPECT_LE(s.eigenvalues[k - 1].real(), s.eigenvalues[k].real() + 1e-9);
    }

    const double c = scale(rng);
    const auto scaled = spectrum(build_laplacian(Digraph(c * w)));
    EXPECT_NEAR(scaled.lambda2_re, c * s.lambda2_re, 1e-8 * c * std::max(1.0, s.lambda2_re));
    EXPECT_LT((scaled.u_bar_1 - s.u_bar_1).cwiseAbs().maxCoeff(), 1e-9);
  }
}
