#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace esoform {

/// Weighted directed interaction topology. Row i of `weights` lists the
/// in-neighbors of agent i: w_ij > 0 means agent i receives information
/// from agent j.
class Digraph {
 public:
  /// Throws InvalidArgument on N < 2, negative weights or a nonzero diagonal.
  explicit Digraph(Eigen::MatrixXd weights);

  struct Edge {
    int from;  // 0-based source j
    int to;    // 0-based receiver i
    double weight;
  };
  static Digraph from_edges(int n_agents, const std::vector<Edge>& edges);

  [[nodiscard]] int n_agents() const noexcept {
    return static_cast<int>(weights_.rows());
  }
  [[nodiscard]] const Eigen::MatrixXd& weights() const noexcept {
    return weights_;
  }
  [[nodiscard]] double weight(int i, int j) const { return weights_(i, j); }

 private:
  Eigen::MatrixXd weights_;
};

struct LaplacianSpectrum {
  // Ascending real part, ties broken by ascending imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  double lambda2_re = 0.0;
  // Left null vector of L normalized so that u_bar_1 . 1_N = 1.
  Eigen::RowVectorXd u_bar_1;
};

/// L = D - W, D the in-degree (row-sum) matrix.
[[nodiscard]] Eigen::MatrixXd build_laplacian(const Digraph& g);

/// True iff some node has a directed path to every other node.
[[nodiscard]] bool has_spanning_tree(const Digraph& g);

/// Eigenvalues, Re(lambda_2) and u_bar_1 of a digraph Laplacian. Throws
/// NoSpanningTree when the zero eigenvalue is not simple.
[[nodiscard]] LaplacianSpectrum spectrum(const Eigen::MatrixXd& laplacian);

/// Scale-relative threshold below which an eigenvalue counts as zero.
[[nodiscard]] double zero_eigenvalue_tolerance(const Eigen::MatrixXd& laplacian);

}  // namespace esoform
