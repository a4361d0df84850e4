#pragma once

#include <vector>

#include <Eigen/Dense>

#include "esoform/eso.hpp"
#include "esoform/riccati.hpp"
#include "esoform/signals.hpp"

namespace esoform {

struct IntegratorSettings {
  double dt = 1e-3;
  double horizon = 20.0;
  // Record every `decimation`-th step (the final step is always recorded).
  int decimation = 10;
};

/// Everything a closed-loop run needs. Agent-indexed matrices have one row
/// per agent; `initial_state` rows are [p_i, v_i] (2n columns).
struct SimulationSetup {
  Eigen::MatrixXd weights;
  PlantParams plant;
  GainRow gain;
  Eigen::RowVectorXd u_bar_1;
  FormationSpec formation;
  DisturbanceSpec disturbance;
  std::vector<EsoParams> eso;
  Eigen::MatrixXd initial_state;
  IntegratorSettings integrator;
  // When false the protocol runs without the observer's compensation term.
  bool compensation = true;

  [[nodiscard]] int n_agents() const { return static_cast<int>(weights.rows()); }
  [[nodiscard]] int n_axes() const { return plant.n_axes; }
  /// Throws InvalidArgument on inconsistent dimensions or settings.
  void validate() const;
};

/// Stacked closed-loop state. Per agent the block is [p, v, g, z], each of
/// length n, so agent i occupies y[4 n i, 4 n (i + 1)).
struct SystemState {
  double t = 0.0;
  Eigen::VectorXd y;
};

struct TraceSample {
  double t = 0.0;
  Eigen::MatrixXd x;          // N x 2n, rows [p_i, v_i]
  Eigen::MatrixXd u;          // N x n
  Eigen::MatrixXd omega;      // N x n, true disturbance
  Eigen::MatrixXd z;          // N x n, compensation applied in the protocol
  Eigen::VectorXd kappa;      // 2n, formation center (u_bar_1 (x) I)(x - f)
  Eigen::MatrixXd deviation;  // N x 2n, x_i - f_i - kappa
  double error = 0.0;         // max_i ||deviation_i||_2
};

struct SimulationTrace {
  int n_agents = 0;
  int n_axes = 0;
  std::vector<TraceSample> samples;

  [[nodiscard]] std::vector<double> times() const;
  [[nodiscard]] std::vector<double> errors() const;
  /// Largest e(t) over samples with t0 <= t <= t1.
  [[nodiscard]] double max_error(double t0, double t1) const;
};

/// Protocol for agent i:
///   u_i = K_u sum_j w_ij (x_j - x_i - f_j + f_i) - alpha f_i + d/dt f_iv - z_i
/// `x` and `f` are N x 2n with rows [p, v]; only relative terms enter the sum.
[[nodiscard]] Eigen::VectorXd control_input(int i, const Eigen::MatrixXd& weights,
                                            const Eigen::MatrixXd& x,
                                            const Eigen::MatrixXd& f,
                                            const Eigen::VectorXd& fv_rate_i,
                                            const Eigen::VectorXd& z_i,
                                            const GainRow& gain,
                                            const PlantParams& plant);

/// RK4 stability guidance for observer poles at -sigma: dt <= 0.28 / sigma.
[[nodiscard]] double recommended_max_dt(const std::vector<EsoParams>& eso);

class Simulator {
 public:
  explicit Simulator(SimulationSetup setup);

  [[nodiscard]] const SimulationSetup& setup() const { return setup_; }

  /// x(0) from the setup, g(0) = v(0), z(0) = 0.
  [[nodiscard]] SystemState initial_state() const;

  /// Classical RK4 step of size dt. Throws NonFiniteState on divergence.
  [[nodiscard]] SystemState step(const SystemState& state, double dt) const;

  [[nodiscard]] Eigen::VectorXd derivative(double t,
                                           const Eigen::VectorXd& y) const;

  [[nodiscard]] TraceSample sample(const SystemState& state) const;

  /// Integrate over [0, horizon] and record every decimated step.
  [[nodiscard]] SimulationTrace run() const;

 private:
  struct Evaluation {
    Eigen::VectorXd y_dot;
    Eigen::MatrixXd u;
    Eigen::MatrixXd omega;
    Eigen::MatrixXd z_applied;
  };
  [[nodiscard]] Evaluation evaluate(double t, const Eigen::VectorXd& y) const;
  [[nodiscard]] Eigen::MatrixXd formation_matrix(double t,
                                                 Eigen::MatrixXd* fv_rate) const;

  SimulationSetup setup_;
};

}  // namespace esoform
