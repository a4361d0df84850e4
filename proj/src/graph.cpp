#include "esoform/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "esoform/errors.hpp"

namespace esoform {

Digraph::Digraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw InvalidArgument("weight matrix must be square");
  }
  if (weights_.rows() < 2) {
    throw InvalidArgument("digraph needs at least 2 agents");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) {
      throw InvalidArgument("self-loop weight w_" + std::to_string(i + 1) +
                            std::to_string(i + 1) + " must be 0");
    }
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      if (!std::isfinite(weights_(i, j)) || weights_(i, j) < 0.0) {
        throw InvalidArgument("edge weights must be finite and nonnegative");
      }
    }
  }
}

Digraph Digraph::from_edges(int n_agents, const std::vector<Edge>& edges) {
  if (n_agents < 2) throw InvalidArgument("digraph needs at least 2 agents");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_agents, n_agents);
  for (const auto& e : edges) {
    if (e.from < 0 || e.to < 0 || e.from >= n_agents || e.to >= n_agents) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (e.from == e.to) throw InvalidArgument("self-loops are not allowed");
    w(e.to, e.from) += e.weight;
  }
  return Digraph(std::move(w));
}

Eigen::MatrixXd build_laplacian(const Digraph& g) {
  const auto& w = g.weights();
  Eigen::MatrixXd laplacian = -w;
  laplacian.diagonal() = w.rowwise().sum();
  return laplacian;
}

bool has_spanning_tree(const Digraph& g) {
  const int n = g.n_agents();
  // Information flows j -> i whenever w_ij > 0.
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.weight(i, j) > 0.0) out[j].push_back(i);
    }
  }
  std::vector<char> seen(n);
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, root);
    seen[root] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int next : out[v]) {
        if (!seen[next]) {
          seen[next] = 1;
          ++reached;
          stack.push_back(next);
        }
      }
    }
    if (reached == n) return true;
  }
  return false;
}

double zero_eigenvalue_tolerance(const Eigen::MatrixXd& laplacian) {
  const double norm_inf = laplacian.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-8 * std::max(1.0, norm_inf);
}

namespace {

void sort_eigenvalues(std::vector<std::complex<double>>& values, double tol) {
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.real() < b.real(); });
  // Real parts within tol form one group, ordered by imaginary part, so
  // conjugate pairs come out deterministically despite rounding noise.
  auto begin = values.begin();
  while (begin != values.end()) {
    auto end = begin + 1;
    while (end != values.end() && end->real() - begin->real() <= tol) ++end;
    std::sort(begin, end,
              [](const auto& a, const auto& b) { return a.imag() < b.imag(); });
    begin = end;
  }
}

}  // namespace

LaplacianSpectrum spectrum(const Eigen::MatrixXd& laplacian) {
  const double tol = zero_eigenvalue_tolerance(laplacian);

  Eigen::EigenSolver<Eigen::MatrixXd> right(laplacian, false);
  if (right.info() != Eigen::Success) {
    throw NoSpanningTree("Laplacian eigen-decomposition did not converge");
  }
  LaplacianSpectrum out;
  out.eigenvalues.assign(right.eigenvalues().begin(), right.eigenvalues().end());
  sort_eigenvalues(out.eigenvalues, tol);

  const auto zeros = std::count_if(
      out.eigenvalues.begin(), out.eigenvalues.end(),
      [tol](const auto& v) { return std::abs(v) < tol; });
  if (zeros != 1) {
    throw NoSpanningTree("zero eigenvalue has multiplicity " +
                         std::to_string(zeros) + ", expected 1");
  }
  out.lambda2_re = out.eigenvalues[1].real();

  // Left eigenproblem: u L = 0  <=>  L^T u^T = 0.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left(
      laplacian.transpose().cast<std::complex<double>>());
  Eigen::Index k = 0;
  left.eigenvalues().cwiseAbs().minCoeff(&k);
  Eigen::VectorXcd v = left.eigenvectors().col(k);
  const std::complex<double> total = v.sum();
  if (std::abs(total) < 1e-10 * v.norm()) {
    throw NoSpanningTree("left null vector is orthogonal to 1_N");
  }
  v /= total;
  if (v.imag().cwiseAbs().maxCoeff() > 1e-10) {
    throw NoSpanningTree("left null vector has a nonzero imaginary part");
  }
  out.u_bar_1 = v.real().transpose();
  return out;
}

}  // namespace esoform
