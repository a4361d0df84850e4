#include "esoform/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "esoform/errors.hpp"

namespace esoform {

void SimulationSetup::validate() const {
  const int n = n_axes();
  const int agents = n_agents();
  if (n < 1) throw InvalidArgument("n_axes must be >= 1");
  if (agents < 1 || weights.cols() != agents) {
    throw InvalidArgument("weight matrix must be square and nonempty");
  }
  if (u_bar_1.size() != agents) throw InvalidArgument("u_bar_1 length != N");
  if (formation.n_agents() != agents || formation.n_axes != n) {
    throw InvalidArgument("formation spec dimensions do not match N x n");
  }
  formation.validate();
  if (disturbance.n_agents() != agents || disturbance.n_axes != n) {
    throw InvalidArgument("disturbance spec dimensions do not match N x n");
  }
  disturbance.validate();
  if (static_cast<int>(eso.size()) != agents) {
    throw InvalidArgument("need one observer parameter set per agent");
  }
  if (initial_state.rows() != agents || initial_state.cols() != 2 * n) {
    throw InvalidArgument("initial_state must be N x 2n");
  }
  if (!initial_state.allFinite()) throw InvalidArgument("initial_state not finite");
  if (!(integrator.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(integrator.horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (integrator.decimation < 1) throw InvalidArgument("decimation must be >= 1");
}

std::vector<double> SimulationTrace::times() const {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.t);
  return t;
}

std::vector<double> SimulationTrace::errors() const {
  std::vector<double> e;
  e.reserve(samples.size());
  for (const auto& s : samples) e.push_back(s.error);
  return e;
}

double SimulationTrace::max_error(double t0, double t1) const {
  double m = 0.0;
  for (const auto& s : samples) {
    if (s.t >= t0 - 1e-12 && s.t <= t1 + 1e-12) m = std::max(m, s.error);
  }
  return m;
}

Eigen::VectorXd control_input(int i, const Eigen::MatrixXd& weights,
                              const Eigen::MatrixXd& x,
                              const Eigen::MatrixXd& f,
                              const Eigen::VectorXd& fv_rate_i,
                              const Eigen::VectorXd& z_i, const GainRow& gain,
                              const PlantParams& plant) {
  const int n = plant.n_axes;
  Eigen::RowVectorXd consensus = Eigen::RowVectorXd::Zero(2 * n);
  for (Eigen::Index j = 0; j < weights.cols(); ++j) {
    const double w = weights(i, j);
    if (w != 0.0) consensus += w * ((x.row(j) - x.row(i)) - (f.row(j) - f.row(i)));
  }
  Eigen::VectorXd u = gain.k_p * consensus.head(n).transpose() +
                      gain.k_v * consensus.tail(n).transpose();
  u -= plant.alpha_p * f.row(i).head(n).transpose() +
       plant.alpha_v * f.row(i).tail(n).transpose();
  u += fv_rate_i;
  u -= z_i;
  return u;
}

double recommended_max_dt(const std::vector<EsoParams>& eso) {
  double fastest = 0.0;
  for (const auto& p : eso) fastest = std::max(fastest, 0.5 * p.beta_g);
  return fastest > 0.0 ? 0.28 / fastest : INFINITY;
}

Simulator::Simulator(SimulationSetup setup) : setup_(std::move(setup)) {
  setup_.validate();
}

SystemState Simulator::initial_state() const {
  const int n = setup_.n_axes();
  const int agents = setup_.n_agents();
  SystemState s;
  s.y = Eigen::VectorXd::Zero(4 * n * agents);
  for (int i = 0; i < agents; ++i) {
    const auto& x0 = setup_.initial_state.row(i);
    s.y.segment(4 * n * i, 2 * n) = x0.transpose();
    s.y.segment(4 * n * i + 2 * n, n) = x0.tail(n).transpose();
  }
  return s;
}

Eigen::MatrixXd Simulator::formation_matrix(double t,
                                            Eigen::MatrixXd* fv_rate) const {
  const int n = setup_.n_axes();
  const int agents = setup_.n_agents();
  Eigen::MatrixXd f(agents, 2 * n);
  if (fv_rate) fv_rate->resize(agents, n);
  for (int i = 0; i < agents; ++i) {
    const auto fs = eval_formation(setup_.formation, i, t);
    f.row(i).head(n) = fs.position.transpose();
    f.row(i).tail(n) = fs.velocity.transpose();
    if (fv_rate) fv_rate->row(i) = fs.velocity_rate.transpose();
  }
  return f;
}

Simulator::Evaluation Simulator::evaluate(double t,
                                          const Eigen::VectorXd& y) const {
  const int n = setup_.n_axes();
  const int agents = setup_.n_agents();
  const auto& plant = setup_.plant;

  Eigen::MatrixXd x(agents, 2 * n);
  for (int i = 0; i < agents; ++i) x.row(i) = y.segment(4 * n * i, 2 * n).transpose();
  Eigen::MatrixXd fv_rate;
  const Eigen::MatrixXd f = formation_matrix(t, &fv_rate);

  Evaluation ev;
  ev.y_dot.resize(y.size());
  ev.u.resize(agents, n);
  ev.omega.resize(agents, n);
  ev.z_applied.resize(agents, n);
  for (int i = 0; i < agents; ++i) {
    const Eigen::Index base = 4 * n * i;
    const Eigen::VectorXd p = y.segment(base, n);
    const Eigen::VectorXd v = y.segment(base + n, n);
    EsoState obs{y.segment(base + 2 * n, n), y.segment(base + 3 * n, n)};
    const Eigen::VectorXd z_applied =
        setup_.compensation ? obs.z : Eigen::VectorXd::Zero(n);

    const Eigen::VectorXd u = control_input(i, setup_.weights, x, f,
                                            fv_rate.row(i).transpose(),
                                            z_applied, setup_.gain, plant);
    const Eigen::VectorXd w = eval_disturbance(setup_.disturbance, i, t);
    const auto obs_dot = eso_derivative(obs, p, v, u, setup_.eso[i], plant);

    ev.y_dot.segment(base, n) = v;
    ev.y_dot.segment(base + n, n) = plant.alpha_p * p + plant.alpha_v * v + u + w;
    ev.y_dot.segment(base + 2 * n, n) = obs_dot.g_dot;
    ev.y_dot.segment(base + 3 * n, n) = obs_dot.z_dot;
    ev.u.row(i) = u.transpose();
    ev.omega.row(i) = w.transpose();
    ev.z_applied.row(i) = z_applied.transpose();
  }
  return ev;
}

Eigen::VectorXd Simulator::derivative(double t, const Eigen::VectorXd& y) const {
  return evaluate(t, y).y_dot;
}

SystemState Simulator::step(const SystemState& state, double dt) const {
  if (!(dt > 0.0)) throw InvalidArgument("step size must be positive");
  const double t = state.t;
  const Eigen::VectorXd& y = state.y;
  const Eigen::VectorXd k1 = derivative(t, y);
  const Eigen::VectorXd k2 = derivative(t + 0.5 * dt, y + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = derivative(t + 0.5 * dt, y + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = derivative(t + dt, y + dt * k3);
  SystemState next{t + dt, y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
  if (!next.y.allFinite()) {
    std::ostringstream msg;
    msg << "state left the finite range at t=" << next.t;
    throw NonFiniteState(msg.str());
  }
  return next;
}

TraceSample Simulator::sample(const SystemState& state) const {
  const int n = setup_.n_axes();
  const int agents = setup_.n_agents();
  const Evaluation ev = evaluate(state.t, state.y);

  TraceSample s;
  s.t = state.t;
  s.x.resize(agents, 2 * n);
  for (int i = 0; i < agents; ++i) {
    s.x.row(i) = state.y.segment(4 * n * i, 2 * n).transpose();
  }
  s.u = ev.u;
  s.omega = ev.omega;
  s.z = ev.z_applied;
  const Eigen::MatrixXd xi = s.x - formation_matrix(state.t, nullptr);
  s.kappa = (setup_.u_bar_1 * xi).transpose();
  s.deviation = xi.rowwise() - s.kappa.transpose();
  s.error = s.deviation.rowwise().norm().maxCoeff();
  return s;
}

SimulationTrace Simulator::run() const {
  const auto& cfg = setup_.integrator;
  const auto steps =
      static_cast<long>(std::ceil(cfg.horizon / cfg.dt - 1e-9));

  SimulationTrace trace;
  trace.n_agents = setup_.n_agents();
  trace.n_axes = setup_.n_axes();
  trace.samples.reserve(static_cast<std::size_t>(steps / cfg.decimation + 2));

  SystemState state = initial_state();
  trace.samples.push_back(sample(state));
  for (long k = 1; k <= steps; ++k) {
    // Step from the nominal grid point so time does not accumulate rounding.
    const double t_next = std::min(static_cast<double>(k) * cfg.dt, cfg.horizon);
    state = step(state, t_next - state.t);
    state.t = t_next;
    if (k % cfg.decimation == 0 || k == steps) trace.samples.push_back(sample(state));
  }
  return trace;
}

}  // namespace esoform
