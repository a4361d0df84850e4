#include "esoform/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "esoform/errors.hpp"

namespace esoform {

double Sinusoid::value(double t) const {
  return amplitude * std::sin(angular_frequency * t + phase) + offset;
}

double Sinusoid::derivative(double t) const {
  return amplitude * angular_frequency * std::cos(angular_frequency * t + phase);
}

double AxisSignal::value(double t) const {
  double s = 0.0;
  for (const auto& term : terms) s += term.value(t);
  return s;
}

double AxisSignal::derivative(double t) const {
  double s = 0.0;
  for (const auto& term : terms) s += term.derivative(t);
  return s;
}

void FormationSpec::validate() const {
  if (n_axes < 1) throw InvalidArgument("formation needs n_axes >= 1");
  for (const auto& a : agents) {
    if (static_cast<int>(a.position.size()) != n_axes ||
        static_cast<int>(a.velocity.size()) != n_axes) {
      throw InvalidArgument("formation agent axis count differs from n_axes");
    }
  }
}

void DisturbanceSpec::validate() const {
  if (n_axes < 1) throw InvalidArgument("disturbance needs n_axes >= 1");
  for (const auto& a : agents) {
    if (static_cast<int>(a.size()) != n_axes) {
      throw InvalidArgument("disturbance agent axis count differs from n_axes");
    }
  }
}

std::vector<double> DisturbanceSpec::frequencies() const {
  std::vector<double> out;
  for (const auto& agent : agents) {
    for (const auto& axis : agent) {
      for (const auto& term : axis.terms) {
        const double w = std::abs(term.angular_frequency);
        if (w > 0.0 && term.amplitude != 0.0) out.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FormationSample eval_formation(const FormationSpec& spec, int i, double t) {
  const auto& agent = spec.agents.at(static_cast<std::size_t>(i));
  FormationSample s;
  s.position.resize(spec.n_axes);
  s.velocity.resize(spec.n_axes);
  s.position_rate.resize(spec.n_axes);
  s.velocity_rate.resize(spec.n_axes);
  for (int d = 0; d < spec.n_axes; ++d) {
    s.position[d] = agent.position[d].value(t);
    s.velocity[d] = agent.velocity[d].value(t);
    s.position_rate[d] = agent.position[d].derivative(t);
    s.velocity_rate[d] = agent.velocity[d].derivative(t);
  }
  return s;
}

Eigen::VectorXd eval_disturbance(const DisturbanceSpec& spec, int i, double t) {
  const auto& agent = spec.agents.at(static_cast<std::size_t>(i));
  Eigen::VectorXd w(spec.n_axes);
  for (int d = 0; d < spec.n_axes; ++d) w[d] = agent[d].value(t);
  return w;
}

FeasibilityReport feasibility_residual(const FormationSpec& spec,
                                       const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("feasibility grid is empty");
  FeasibilityReport r;
  r.per_agent.assign(spec.agents.size(), 0.0);
  for (int i = 0; i < spec.n_agents(); ++i) {
    const auto& agent = spec.agents[i];
    double worst = 0.0;
    for (double t : t_grid) {
      for (int d = 0; d < spec.n_axes; ++d) {
        worst = std::max(worst, std::abs(agent.velocity[d].value(t) -
                                         agent.position[d].derivative(t)));
      }
    }
    r.per_agent[i] = worst;
    r.max_residual = std::max(r.max_residual, worst);
  }
  return r;
}

std::vector<double> uniform_grid(double t0, double t1, double step) {
  if (!(step > 0.0) || t1 < t0) throw InvalidArgument("invalid grid bounds");
  const auto count = static_cast<long>(std::floor((t1 - t0) / step + 1e-9));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count) + 1);
  for (long k = 0; k <= count; ++k) g.push_back(t0 + static_cast<double>(k) * step);
  return g;
}

FormationSpec hexagon_formation(int n_agents, double scale, double phase_step,
                                double angular_frequency) {
  using std::numbers::pi;
  const double w = angular_frequency;
  FormationSpec spec;
  spec.n_axes = 3;
  for (int i = 0; i < n_agents; ++i) {
    const double ph = i * phase_step;
    AgentFormation a;
    // cos x = sin(x + pi/2)
    a.position = {AxisSignal{{{scale, w, ph, 0.0}}},
                  AxisSignal{{{scale, w, ph + pi / 2, 0.0}}},
                  AxisSignal{{{-scale, w, ph, 0.0}}}};
    a.velocity = {AxisSignal{{{scale * w, w, ph + pi / 2, 0.0}}},
                  AxisSignal{{{-scale * w, w, ph, 0.0}}},
                  AxisSignal{{{-scale * w, w, ph + pi / 2, 0.0}}}};
    spec.agents.push_back(std::move(a));
  }
  return spec;
}

FormationSpec static_hexagon_formation(int n_agents, double scale,
                                       double phase_step) {
  FormationSpec spec;
  spec.n_axes = 3;
  for (int i = 0; i < n_agents; ++i) {
    const double ph = i * phase_step;
    AgentFormation a;
    a.position = {AxisSignal{{{0, 0, 0, scale * std::sin(ph)}}},
                  AxisSignal{{{0, 0, 0, scale * std::cos(ph)}}},
                  AxisSignal{{{0, 0, 0, -scale * std::sin(ph)}}}};
    a.velocity = {AxisSignal{}, AxisSignal{}, AxisSignal{}};
    spec.agents.push_back(std::move(a));
  }
  return spec;
}

DisturbanceSpec biased_sine_disturbance(int n_agents) {
  using std::numbers::pi;
  DisturbanceSpec spec;
  spec.n_axes = 3;
  for (int i = 0; i < n_agents; ++i) {
    const double k = i;
    spec.agents.push_back({
        AxisSignal{{{2.5 + 0.2 * k, 1.0, 0.0, 1.5 + 1.2 * k}}},
        AxisSignal{{{1.5 + 0.2 * k, 1.0, 0.0, 2.5 + 1.2 * k}}},
        AxisSignal{{{2.0 + 0.2 * k, 1.0, 0.4 * pi, 3.0 + 0.2 * k}}},
    });
  }
  return spec;
}

FormationSpec zero_formation(int n_agents, int n_axes) {
  FormationSpec spec;
  spec.n_axes = n_axes;
  spec.agents.assign(static_cast<std::size_t>(n_agents),
                     AgentFormation{std::vector<AxisSignal>(n_axes),
                                    std::vector<AxisSignal>(n_axes)});
  return spec;
}

DisturbanceSpec zero_disturbance(int n_agents, int n_axes) {
  DisturbanceSpec spec;
  spec.n_axes = n_axes;
  spec.agents.assign(static_cast<std::size_t>(n_agents),
                     std::vector<AxisSignal>(n_axes));
  return spec;
}

}  // namespace esoform
