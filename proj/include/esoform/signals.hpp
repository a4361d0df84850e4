#pragma once

#include <vector>

#include <Eigen/Dense>

namespace esoform {

/// amplitude * sin(angular_frequency * t + phase) + offset
struct Sinusoid {
  double amplitude = 0.0;
  double angular_frequency = 0.0;
  double phase = 0.0;
  double offset = 0.0;

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
};

/// Sum of sinusoid-plus-constant terms on one scalar axis.
struct AxisSignal {
  std::vector<Sinusoid> terms;

  [[nodiscard]] double value(double t) const;
  [[nodiscard]] double derivative(double t) const;
};

/// Per-agent formation offsets f_i = [f_ip; f_iv], each n_axes signals.
struct AgentFormation {
  std::vector<AxisSignal> position;
  std::vector<AxisSignal> velocity;
};

struct FormationSpec {
  int n_axes = 0;
  std::vector<AgentFormation> agents;

  [[nodiscard]] int n_agents() const { return static_cast<int>(agents.size()); }
  /// Throws InvalidArgument if any agent's axis count differs from n_axes.
  void validate() const;
};

/// Per-agent exogenous disturbance w_i(t), n_axes signals each.
struct DisturbanceSpec {
  int n_axes = 0;
  std::vector<std::vector<AxisSignal>> agents;

  [[nodiscard]] int n_agents() const { return static_cast<int>(agents.size()); }
  void validate() const;
  /// Distinct nonzero angular frequencies present in any term, ascending.
  [[nodiscard]] std::vector<double> frequencies() const;
};

struct FormationSample {
  Eigen::VectorXd position;           // f_ip
  Eigen::VectorXd velocity;           // f_iv
  Eigen::VectorXd position_rate;      // d/dt f_ip
  Eigen::VectorXd velocity_rate;      // d/dt f_iv
};

/// Analytic evaluation of agent i (0-based) at time t.
[[nodiscard]] FormationSample eval_formation(const FormationSpec& spec, int i,
                                             double t);

[[nodiscard]] Eigen::VectorXd eval_disturbance(const DisturbanceSpec& spec,
                                               int i, double t);

struct FeasibilityReport {
  std::vector<double> per_agent;  // max over grid of ||f_iv - d/dt f_ip||_inf
  double max_residual = 0.0;
};

/// Sampled check of the kinematic consistency f_iv = d/dt f_ip. The caller
/// compares `max_residual` to its tolerance.
[[nodiscard]] FeasibilityReport feasibility_residual(
    const FormationSpec& spec, const std::vector<double>& t_grid);

/// t0, t0 + step, ..., up to and including t1 (within rounding).
[[nodiscard]] std::vector<double> uniform_grid(double t0, double t1,
                                               double step);

// Presets.

/// Rotating hexagon-style family: with phi_i = omega t + i * phase_step,
///   f_ip = scale [ sin phi_i,  cos phi_i, -sin phi_i]
///   f_iv = scale [ cos phi_i, -sin phi_i, -cos phi_i] * omega
/// on three axes, so f_iv is exactly d/dt f_ip.
[[nodiscard]] FormationSpec hexagon_formation(int n_agents, double scale,
                                              double phase_step,
                                              double angular_frequency = 1.0);

/// Hexagon positions frozen at t = 0 with zero velocity offsets.
[[nodiscard]] FormationSpec static_hexagon_formation(int n_agents, double scale,
                                                     double phase_step);

/// Biased sinusoidal disturbance family with per-agent growth:
///   w_i = [(2.5 + 0.2 i) sin t + 1.5 + 1.2 i,
///          (1.5 + 0.2 i) sin t + 2.5 + 1.2 i,
///          (2.0 + 0.2 i) sin(t + 0.4 pi) + 3 + 0.2 i],  i = 0 .. N-1.
[[nodiscard]] DisturbanceSpec biased_sine_disturbance(int n_agents);

[[nodiscard]] FormationSpec zero_formation(int n_agents, int n_axes);
[[nodiscard]] DisturbanceSpec zero_disturbance(int n_agents, int n_axes);

}  // namespace esoform
