#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace esoform {

/// Agent dynamics  p' = v,  v' = alpha_p p + alpha_v v + u + w  on each of
/// `n_axes` independent axes.
struct PlantParams {
  double alpha_p = 0.0;
  double alpha_v = 0.0;
  int n_axes = 1;
};

/// 2x2 per-axis kernel [[0, 1], [alpha_p, alpha_v]]; the full system matrix
/// is kernel (x) I_n.
[[nodiscard]] Eigen::Matrix2d plant_kernel(const PlantParams& plant);

/// Gain row [k_p, k_v]; the protocol gain is K_u = [k_p, k_v] (x) I_n.
struct GainRow {
  double k_p = 0.0;
  double k_v = 0.0;

  [[nodiscard]] Eigen::RowVector2d row() const { return {k_p, k_v}; }
  /// Full n x 2n gain matrix.
  [[nodiscard]] Eigen::MatrixXd full(int n_axes) const;
};

struct RiccatiSolution {
  Eigen::Matrix2d p_hat;
  double residual = 0.0;
  GainRow gain;
};

/// Closed-form stabilizing solution of
///   P A + A^T P - P B B^T P + I = 0,  A = plant_kernel, B = [0, 1]^T.
/// The 2n x 2n equation factors as P_hat (x) I_n, so only the kernel is solved.
[[nodiscard]] Eigen::Matrix2d solve_are(const PlantParams& plant);

/// Frobenius norm of the ARE residual at `p_hat`.
[[nodiscard]] double are_residual(const Eigen::Matrix2d& p_hat,
                                  const PlantParams& plant);

/// [k_p, k_v] = (1 / lambda2_re) [P_21, P_22]. Throws InvalidLambda2 if
/// lambda2_re <= 0.
[[nodiscard]] GainRow gain(const Eigen::Matrix2d& p_hat, double lambda2_re);

/// Solve, check residual and synthesize the gain in one call.
[[nodiscard]] RiccatiSolution synthesize(const PlantParams& plant,
                                         double lambda2_re);

struct HurwitzMargin {
  std::complex<double> lambda;
  // Largest real part among the eigenvalues of A - lambda B K.
  double max_real_part = 0.0;
  [[nodiscard]] bool stable() const { return max_real_part < 0.0; }
};

/// Closed-loop kernel A - lambda B [k_p, k_v] for one Laplacian eigenvalue.
[[nodiscard]] Eigen::Matrix2cd closed_loop_kernel(const PlantParams& plant,
                                                  const GainRow& gain,
                                                  std::complex<double> lambda);

/// Stability margins of every disagreement mode. `eigenvalues` are
/// lambda_2 .. lambda_N. Throws NotHurwitz naming the offending modes.
std::vector<HurwitzMargin> verify_hurwitz(
    const PlantParams& plant, const GainRow& gain,
    const std::vector<std::complex<double>>& eigenvalues);

/// Same margins without throwing.
[[nodiscard]] std::vector<HurwitzMargin> hurwitz_margins(
    const PlantParams& plant, const GainRow& gain,
    const std::vector<std::complex<double>>& eigenvalues);

}  // namespace esoform
