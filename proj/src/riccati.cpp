#include "esoform/riccati.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "esoform/errors.hpp"

namespace esoform {

Eigen::Matrix2d plant_kernel(const PlantParams& plant) {
  Eigen::Matrix2d a;
  a << 0.0, 1.0, plant.alpha_p, plant.alpha_v;
  return a;
}

Eigen::MatrixXd GainRow::full(int n_axes) const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_axes, 2 * n_axes);
  for (int d = 0; d < n_axes; ++d) {
    k(d, d) = k_p;
    k(d, n_axes + d) = k_v;
  }
  return k;
}

Eigen::Matrix2d solve_are(const PlantParams& plant) {
  const double a = plant.alpha_p;
  const double b = plant.alpha_v;
  // Entry (1,1): 2 a p2 - p2^2 + 1 = 0; (2,2): 2 (p2 + b p3) - p3^2 + 1 = 0;
  // (1,2): p1 + b p2 + a p3 - p2 p3 = 0. Positive roots give the PD solution.
  const double p2 = a + std::hypot(a, 1.0);
  const double p3 = b + std::sqrt(b * b + 2.0 * p2 + 1.0);
  const double p1 = p3 * (p2 - a) - b * p2;

  Eigen::Matrix2d p;
  p << p1, p2, p2, p3;
  if (!(p1 > 0.0) || !(p.determinant() > 0.0)) {
    std::ostringstream msg;
    msg << "closed-form Riccati solution is not positive definite for alpha_p="
        << a << ", alpha_v=" << b;
    throw NotPositiveDefinite(msg.str());
  }
  return p;
}

double are_residual(const Eigen::Matrix2d& p_hat, const PlantParams& plant) {
  const Eigen::Matrix2d a = plant_kernel(plant);
  const Eigen::Vector2d b(0.0, 1.0);
  const Eigen::Matrix2d r = p_hat * a + a.transpose() * p_hat -
                            p_hat * b * b.transpose() * p_hat +
                            Eigen::Matrix2d::Identity();
  return r.norm();
}

GainRow gain(const Eigen::Matrix2d& p_hat, double lambda2_re) {
  if (!(lambda2_re > 0.0)) {
    std::ostringstream msg;
    msg << "Re(lambda_2) must be positive, got " << lambda2_re;
    throw InvalidLambda2(msg.str());
  }
  return {p_hat(1, 0) / lambda2_re, p_hat(1, 1) / lambda2_re};
}

RiccatiSolution synthesize(const PlantParams& plant, double lambda2_re) {
  RiccatiSolution s;
  s.p_hat = solve_are(plant);
  s.residual = are_residual(s.p_hat, plant);
  s.gain = gain(s.p_hat, lambda2_re);
  return s;
}

Eigen::Matrix2cd closed_loop_kernel(const PlantParams& plant,
                                    const GainRow& gain,
                                    std::complex<double> lambda) {
  Eigen::Matrix2cd m = plant_kernel(plant).cast<std::complex<double>>();
  m(1, 0) -= lambda * gain.k_p;
  m(1, 1) -= lambda * gain.k_v;
  return m;
}

std::vector<HurwitzMargin> hurwitz_margins(
    const PlantParams& plant, const GainRow& gain,
    const std::vector<std::complex<double>>& eigenvalues) {
  std::vector<HurwitzMargin> out;
  out.reserve(eigenvalues.size());
  for (const auto& lambda : eigenvalues) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(
        closed_loop_kernel(plant, gain, lambda), false);
    out.push_back({lambda, es.eigenvalues().real().maxCoeff()});
  }
  return out;
}

std::vector<HurwitzMargin> verify_hurwitz(
    const PlantParams& plant, const GainRow& gain,
    const std::vector<std::complex<double>>& eigenvalues) {
  auto margins = hurwitz_margins(plant, gain, eigenvalues);
  std::ostringstream bad;
  for (const auto& m : margins) {
    if (!m.stable()) {
      bad << " lambda=" << m.lambda.real() << (m.lambda.imag() < 0 ? "" : "+")
          << m.lambda.imag() << "i (max Re " << m.max_real_part << ")";
    }
  }
  if (!bad.str().empty()) {
    throw NotHurwitz("closed-loop kernel not Hurwitz for" + bad.str());
  }
  return margins;
}

}  // namespace esoform
