#include "esoform/center.hpp"

#include <cmath>

#include "esoform/errors.hpp"

namespace esoform {

Eigen::Matrix2d kernel_exp(const PlantParams& plant, double t) {
  // A = mu I + N with N^2 = delta I, so e^{A t} = e^{mu t} (C I + S N).
  const double mu = 0.5 * plant.alpha_v;
  const double delta = mu * mu + plant.alpha_p;
  const double nu = std::sqrt(std::abs(delta));
  const double x = nu * t;

  double c = 1.0;
  double s = t;
  if (std::abs(x) < 1e-4) {
    // Series keeps the near-defective case accurate.
    const double sign = delta >= 0.0 ? 1.0 : -1.0;
    const double x2 = sign * x * x;
    c = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
    s = t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
  } else if (delta > 0.0) {
    c = std::cosh(x);
    s = std::sinh(x) / nu;
  } else {
    c = std::cos(x);
    s = std::sin(x) / nu;
  }

  Eigen::Matrix2d nil = plant_kernel(plant);
  nil.diagonal().array() -= mu;
  return std::exp(mu * t) * (c * Eigen::Matrix2d::Identity() + s * nil);
}

Eigen::VectorXd apply_kernel(const Eigen::Matrix2d& m, const Eigen::VectorXd& pv) {
  const Eigen::Index n = pv.size() / 2;
  Eigen::VectorXd out(pv.size());
  out.head(n) = m(0, 0) * pv.head(n) + m(0, 1) * pv.tail(n);
  out.tail(n) = m(1, 0) * pv.head(n) + m(1, 1) * pv.tail(n);
  return out;
}

namespace {

void check_trace(const SimulationTrace& trace, const Eigen::RowVectorXd& u_bar_1) {
  if (trace.samples.empty()) throw InvalidArgument("trace has no samples");
  if (u_bar_1.size() != trace.n_agents) {
    throw InvalidArgument("u_bar_1 length does not match the trace");
  }
}

Eigen::VectorXd lift_velocity(const Eigen::VectorXd& g) {
  Eigen::VectorXd pv = Eigen::VectorXd::Zero(2 * g.size());
  pv.tail(g.size()) = g;
  return pv;
}

}  // namespace

std::vector<Eigen::VectorXd> velocity_channel_convolution(
    const std::vector<double>& times, const std::vector<Eigen::VectorXd>& g,
    const PlantParams& plant) {
  if (times.size() != g.size() || times.empty()) {
    throw InvalidArgument("convolution grid and samples differ in length");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  out.push_back(Eigen::VectorXd::Zero(2 * g.front().size()));
  // I_{k+1} = E_h I_k + h/2 (E_h [0; g_k] + [0; g_{k+1}]) is exactly the
  // composite trapezoid sum of the convolution on the grid.
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    const Eigen::Matrix2d step = kernel_exp(plant, h);
    out.push_back(apply_kernel(step, out.back() + 0.5 * h * lift_velocity(g[k])) +
                  0.5 * h * lift_velocity(g[k + 1]));
  }
  return out;
}

std::vector<Eigen::VectorXd> compute_c0(const SimulationTrace& trace,
                                        const Eigen::RowVectorXd& u_bar_1,
                                        const PlantParams& plant) {
  check_trace(trace, u_bar_1);
  const Eigen::VectorXd start = (u_bar_1 * trace.samples.front().x).transpose();
  const double t0 = trace.samples.front().t;
  std::vector<Eigen::VectorXd> out;
  out.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    out.push_back(apply_kernel(kernel_exp(plant, s.t - t0), start));
  }
  return out;
}

std::vector<Eigen::VectorXd> compute_cz(const SimulationTrace& trace,
                                        const Eigen::RowVectorXd& u_bar_1,
                                        const PlantParams& plant) {
  check_trace(trace, u_bar_1);
  std::vector<Eigen::VectorXd> g;
  g.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    g.push_back((u_bar_1 * (s.omega - s.z)).transpose());
  }
  return velocity_channel_convolution(trace.times(), g, plant);
}

std::vector<Eigen::VectorXd> compute_cf(const SimulationTrace& trace,
                                        const Eigen::RowVectorXd& u_bar_1,
                                        const PlantParams& plant,
                                        const FormationSpec& spec) {
  check_trace(trace, u_bar_1);
  if (spec.n_agents() != trace.n_agents || spec.n_axes != trace.n_axes) {
    throw InvalidArgument("formation spec does not match the trace");
  }
  const int n = trace.n_axes;
  const int agents = trace.n_agents;
  const auto times = trace.times();

  std::vector<Eigen::VectorXd> g;
  std::vector<Eigen::VectorXd> trailing;
  g.reserve(times.size());
  trailing.reserve(times.size());
  for (double t : times) {
    Eigen::VectorXd forcing = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd weighted_f = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < agents; ++i) {
      const auto fs = eval_formation(spec, i, t);
      forcing += u_bar_1[i] * (fs.velocity_rate - plant.alpha_p * fs.position -
                               plant.alpha_v * fs.velocity);
      weighted_f.head(n) += u_bar_1[i] * fs.position;
      weighted_f.tail(n) += u_bar_1[i] * fs.velocity;
    }
    g.push_back(std::move(forcing));
    trailing.push_back(std::move(weighted_f));
  }
  auto out = velocity_channel_convolution(times, g, plant);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= trailing[k];
  return out;
}

CenterDecomposition decompose_center(const SimulationTrace& trace,
                                     const Eigen::RowVectorXd& u_bar_1,
                                     const PlantParams& plant,
                                     const FormationSpec& spec) {
  CenterDecomposition d;
  d.times = trace.times();
  d.c0 = compute_c0(trace, u_bar_1, plant);
  d.cz = compute_cz(trace, u_bar_1, plant);
  d.cf = compute_cf(trace, u_bar_1, plant, spec);
  d.kappa_hat.reserve(d.times.size());
  d.residual.reserve(d.times.size());
  for (std::size_t k = 0; k < d.times.size(); ++k) {
    d.kappa_hat.push_back(d.c0[k] + d.cz[k] + d.cf[k]);
    d.residual.push_back((trace.samples[k].kappa - d.kappa_hat.back()).norm());
  }
  return d;
}

CenterBoundReport verify_center_bound(const CenterDecomposition& dec, double eps,
                               double t_check) {
  CenterBoundReport r;
  r.eps = eps;
  for (std::size_t k = 0; k < dec.times.size(); ++k) {
    if (dec.times[k] >= t_check) r.max_residual = std::max(r.max_residual, dec.residual[k]);
  }
  // Walk backwards to find the earliest time after which r stays below eps.
  std::optional<double> t_eps;
  for (std::size_t k = dec.times.size(); k-- > 0;) {
    if (dec.residual[k] > eps) break;
    t_eps = dec.times[k];
  }
  r.t_eps = t_eps;
  return r;
}

}  // namespace esoform
