#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "esoform/riccati.hpp"
#include "esoform/signals.hpp"
#include "esoform/simulator.hpp"

namespace esoform {

/// Formation-center decomposition kappa ~ c0 + cz + cf on a trace's grid.
/// Each series entry is a 2n vector laid out [p (n), v (n)].
///   c0(t) = e^{A t} (u1 (x) I) x(0)
///   cz(t) = int_0^t e^{A (t - s)} theta2 (u1 (x) I)(w(s) - z(s)) ds
///   cf(t) = int_0^t e^{A (t - s)} theta2 (u1 (x) I)(f_v' - a_p f_p - a_v f_v) ds
///           - (u1 (x) I) f(t)
/// with A the per-axis plant kernel. Integrals use the composite trapezoid
/// rule on the trace grid.
struct CenterDecomposition {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> c0;
  std::vector<Eigen::VectorXd> cz;
  std::vector<Eigen::VectorXd> cf;
  std::vector<Eigen::VectorXd> kappa_hat;
  std::vector<double> residual;  // ||kappa - kappa_hat||_2
};

/// Exact e^{A t} for A = [[0, 1], [alpha_p, alpha_v]].
[[nodiscard]] Eigen::Matrix2d kernel_exp(const PlantParams& plant, double t);

/// Apply the 2x2 kernel blockwise to a 2n vector [p; v].
[[nodiscard]] Eigen::VectorXd apply_kernel(const Eigen::Matrix2d& m,
                                           const Eigen::VectorXd& pv);

[[nodiscard]] std::vector<Eigen::VectorXd> compute_c0(
    const SimulationTrace& trace, const Eigen::RowVectorXd& u_bar_1,
    const PlantParams& plant);

[[nodiscard]] std::vector<Eigen::VectorXd> compute_cz(
    const SimulationTrace& trace, const Eigen::RowVectorXd& u_bar_1,
    const PlantParams& plant);

[[nodiscard]] std::vector<Eigen::VectorXd> compute_cf(
    const SimulationTrace& trace, const Eigen::RowVectorXd& u_bar_1,
    const PlantParams& plant, const FormationSpec& spec);

/// Trapezoidal variation-of-constants integral
///   out_k = int_0^{t_k} e^{A (t_k - s)} [0; g(s)] ds
/// for n-vector samples g_k on `times`. Exposed for reuse and testing.
[[nodiscard]] std::vector<Eigen::VectorXd> velocity_channel_convolution(
    const std::vector<double>& times, const std::vector<Eigen::VectorXd>& g,
    const PlantParams& plant);

[[nodiscard]] CenterDecomposition decompose_center(
    const SimulationTrace& trace, const Eigen::RowVectorXd& u_bar_1,
    const PlantParams& plant, const FormationSpec& spec);

struct CenterBoundReport {
  double max_residual = 0.0;      // sup of r(t) over t >= t_check
  std::optional<double> t_eps;    // earliest t with r(s) <= eps for all s >= t
  double eps = 0.0;
  [[nodiscard]] bool passed() const { return t_eps.has_value(); }
};

[[nodiscard]] CenterBoundReport verify_center_bound(const CenterDecomposition& dec,
                                             double eps, double t_check = 0.0);

}  // namespace esoform
