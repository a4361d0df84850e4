#include "esoform/eso.hpp"

#include <cmath>
#include <string>

#include "esoform/errors.hpp"

namespace esoform {

EsoParams EsoParams::from_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("observer bandwidth sigma must be positive, got " +
                          std::to_string(sigma));
  }
  return {2.0 * sigma, sigma * sigma};
}

EsoParams EsoParams::from_betas(double beta_g, double beta_z) {
  if (!(beta_g > 0.0) || !(beta_z > 0.0)) {
    throw InvalidArgument("observer gains beta_g, beta_z must be positive");
  }
  return {beta_g, beta_z};
}

EsoDerivative eso_derivative(const EsoState& state,
                             const Eigen::VectorXd& position,
                             const Eigen::VectorXd& velocity,
                             const Eigen::VectorXd& control,
                             const EsoParams& params,
                             const PlantParams& plant) {
  const Eigen::VectorXd innovation = state.g - velocity;
  return {state.z + control + plant.alpha_p * position +
              plant.alpha_v * velocity - params.beta_g * innovation,
          -params.beta_z * innovation};
}

std::complex<double> eso_transfer(const EsoParams& params,
                                  std::complex<double> s) {
  return params.beta_z / (s * s + params.beta_g * s + params.beta_z);
}

std::complex<double> residual_gain(double sigma, double omega_freq) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const std::complex<double> s(0.0, omega_freq);
  const std::complex<double> d = s + sigma;
  return 1.0 - sigma * sigma / (d * d);
}

Eigen::Matrix2d eso_error_matrix(const EsoParams& params) {
  Eigen::Matrix2d m;
  m << -params.beta_g, 1.0, -params.beta_z, 0.0;
  return m;
}

}  // namespace esoform
