#pragma once

#include <complex>

#include <Eigen/Dense>

#include "esoform/riccati.hpp"

namespace esoform {

/// Observer bandwidth constants. The documented path is `from_sigma`, which
/// places both observer poles at -sigma.
struct EsoParams {
  double beta_g = 0.0;
  double beta_z = 0.0;

  /// beta_g = 2 sigma, beta_z = sigma^2. Throws InvalidArgument if sigma <= 0.
  static EsoParams from_sigma(double sigma);
  static EsoParams from_betas(double beta_g, double beta_z);
};

/// Per-agent observer state: g estimates velocity, z estimates the
/// disturbance. Each axis is an independent scalar observer.
struct EsoState {
  Eigen::VectorXd g;
  Eigen::VectorXd z;
};

struct EsoDerivative {
  Eigen::VectorXd g_dot;
  Eigen::VectorXd z_dot;
};

///   g' = z + u + alpha_p p + alpha_v v - beta_g (g - v)
///   z' = -beta_z (g - v)
[[nodiscard]] EsoDerivative eso_derivative(const EsoState& state,
                                           const Eigen::VectorXd& position,
                                           const Eigen::VectorXd& velocity,
                                           const Eigen::VectorXd& control,
                                           const EsoParams& params,
                                           const PlantParams& plant);

/// Disturbance-to-estimate transfer G(s) = beta_z / (s^2 + beta_g s + beta_z).
[[nodiscard]] std::complex<double> eso_transfer(const EsoParams& params,
                                                std::complex<double> s);

/// Residual 1 - G(j omega) with G(s) = sigma^2 / (s + sigma)^2.
[[nodiscard]] std::complex<double> residual_gain(double sigma,
                                                 double omega_freq);

/// Error-system matrix [[-beta_g, 1], [-beta_z, 0]] of (g - v, z - w) under
/// a constant disturbance.
[[nodiscard]] Eigen::Matrix2d eso_error_matrix(const EsoParams& params);

}  // namespace esoform
