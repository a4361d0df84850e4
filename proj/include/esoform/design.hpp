#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "esoform/eso.hpp"
#include "esoform/graph.hpp"
#include "esoform/riccati.hpp"
#include "esoform/signals.hpp"

namespace esoform {

struct DesignInputs {
  Eigen::MatrixXd weights;  // validated into a Digraph by design()
  PlantParams plant;
  FormationSpec formation;
  double eps_f = 1e-6;
  std::vector<double> feasibility_grid;
  std::vector<EsoParams> eso;
  std::optional<DisturbanceSpec> disturbance;
  std::optional<double> lambda2_override;
};

/// Predicted |1 - G(j w)| of one agent's observer at one disturbance frequency.
struct ResidualPrediction {
  int agent = 0;
  double frequency = 0.0;
  double magnitude = 0.0;
};

struct DesignReport {
  PlantParams plant;

  // Step 1
  bool feasible = false;
  double eps_f = 0.0;
  std::vector<double> feasibility_per_agent;
  double feasibility_max = 0.0;
  double grid_start = 0.0;
  double grid_end = 0.0;
  std::size_t grid_points = 0;

  // Topology
  std::vector<std::complex<double>> eigenvalues;
  double lambda2_re = 0.0;       // from the Laplacian
  double lambda2_used = 0.0;     // what the gain was synthesized with
  bool lambda2_overridden = false;
  Eigen::RowVectorXd u_bar_1;

  // Steps 2-3
  Eigen::Matrix2d p_hat = Eigen::Matrix2d::Zero();
  double are_residual = 0.0;
  GainRow gain;
  std::vector<HurwitzMargin> hurwitz;

  // Step 4
  std::vector<EsoParams> eso;
  std::vector<ResidualPrediction> predictions;
  std::vector<std::string> warnings;
};

/// Observers are flagged when the predicted residual exceeds this.
inline constexpr double kResidualWarnThreshold = 0.25;

/// Runs the four-step design: feasibility check (Infeasible), spectrum
/// (NoSpanningTree), Riccati gain, observer residual prediction, and always a
/// Hurwitz certification of every disagreement mode (NotHurwitz).
[[nodiscard]] DesignReport design(const DesignInputs& in);

/// |1 - G(j w)| for arbitrary (beta_g, beta_z).
[[nodiscard]] double predicted_residual(const EsoParams& p, double frequency);

/// sigma when the observer is critically damped (beta_g^2 = 4 beta_z).
[[nodiscard]] std::optional<double> critical_sigma(const EsoParams& p);

[[nodiscard]] nlohmann::ordered_json to_json(const DesignReport& r);
[[nodiscard]] std::string format_report(const DesignReport& r);

}  // namespace esoform
