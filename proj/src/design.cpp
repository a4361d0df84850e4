#include "esoform/design.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "esoform/errors.hpp"

namespace esoform {

double predicted_residual(const EsoParams& p, double frequency) {
  return std::abs(1.0 - eso_transfer(p, {0.0, frequency}));
}

std::optional<double> critical_sigma(const EsoParams& p) {
  const double sigma = 0.5 * p.beta_g;
  if (std::abs(sigma * sigma - p.beta_z) <= 1e-12 * std::max(1.0, p.beta_z)) {
    return sigma;
  }
  return std::nullopt;
}

DesignReport design(const DesignInputs& in) {
  const Digraph graph(in.weights);
  const int agents = graph.n_agents();
  if (in.formation.n_agents() != agents || in.formation.n_axes != in.plant.n_axes) {
    throw InvalidArgument("formation spec does not match topology/plant");
  }
  if (static_cast<int>(in.eso.size()) != agents) {
    throw InvalidArgument("need one observer parameter set per agent");
  }

  DesignReport r;
  r.plant = in.plant;

  // Step 1: formation feasibility.
  const auto feas = feasibility_residual(in.formation, in.feasibility_grid);
  r.eps_f = in.eps_f;
  r.feasibility_per_agent = feas.per_agent;
  r.feasibility_max = feas.max_residual;
  r.grid_start = in.feasibility_grid.front();
  r.grid_end = in.feasibility_grid.back();
  r.grid_points = in.feasibility_grid.size();
  r.feasible = feas.max_residual <= in.eps_f;
  if (!r.feasible) {
    std::ostringstream msg;
    msg << "formation feasibility residual " << feas.max_residual
        << " exceeds eps_f=" << in.eps_f;
    throw Infeasible(msg.str());
  }

  if (!has_spanning_tree(graph)) {
    throw NoSpanningTree("interaction topology has no directed spanning tree");
  }
  const auto spec = spectrum(build_laplacian(graph));
  r.eigenvalues = spec.eigenvalues;
  r.lambda2_re = spec.lambda2_re;
  r.u_bar_1 = spec.u_bar_1;
  r.lambda2_overridden = in.lambda2_override.has_value();
  r.lambda2_used = in.lambda2_override.value_or(spec.lambda2_re);

  // Steps 2-3: Riccati kernel and gain.
  const auto ric = synthesize(in.plant, r.lambda2_used);
  r.p_hat = ric.p_hat;
  r.are_residual = ric.residual;
  r.gain = ric.gain;

  const std::vector<std::complex<double>> modes(spec.eigenvalues.begin() + 1,
                                                spec.eigenvalues.end());
  r.hurwitz = verify_hurwitz(in.plant, r.gain, modes);

  // Step 4: observer bandwidths and their predicted rejection.
  r.eso = in.eso;
  if (in.disturbance) {
    for (double w : in.disturbance->frequencies()) {
      for (int i = 0; i < agents; ++i) {
        const double m = predicted_residual(in.eso[i], w);
        r.predictions.push_back({i, w, m});
        if (m > kResidualWarnThreshold) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "agent %d: predicted |1-G(j%.6g)| = %.4f exceeds %.2f; "
                        "consider a larger observer bandwidth",
                        i + 1, w, m, kResidualWarnThreshold);
          r.warnings.emplace_back(buf);
        }
      }
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const DesignReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["plant"] = {{"alpha_p", r.plant.alpha_p},
                {"alpha_v", r.plant.alpha_v},
                {"n_axes", r.plant.n_axes}};
  j["feasibility"] = {{"feasible", r.feasible},
                      {"eps_f", r.eps_f},
                      {"max_residual", r.feasibility_max},
                      {"per_agent", r.feasibility_per_agent},
                      {"grid", {{"start", r.grid_start},
                                {"end", r.grid_end},
                                {"points", r.grid_points}}}};
  ordered_json eig = ordered_json::array();
  for (const auto& l : r.eigenvalues) eig.push_back({l.real(), l.imag()});
  std::vector<double> u(r.u_bar_1.data(), r.u_bar_1.data() + r.u_bar_1.size());
  j["spectrum"] = {{"eigenvalues", eig},
                   {"lambda2_re", r.lambda2_re},
                   {"u_bar_1", u}};
  j["lambda2_used"] = r.lambda2_used;
  j["lambda2_overridden"] = r.lambda2_overridden;
  j["riccati"] = {{"p_hat", {{r.p_hat(0, 0), r.p_hat(0, 1)},
                             {r.p_hat(1, 0), r.p_hat(1, 1)}}},
                  {"residual", r.are_residual}};
  j["gain_row"] = {r.gain.k_p, r.gain.k_v};
  ordered_json hw = ordered_json::array();
  for (const auto& m : r.hurwitz) {
    hw.push_back({{"lambda", {m.lambda.real(), m.lambda.imag()}},
                  {"max_real_part", m.max_real_part}});
  }
  j["hurwitz"] = hw;
  ordered_json obs = ordered_json::array();
  for (const auto& p : r.eso) {
    ordered_json o = {{"beta_g", p.beta_g}, {"beta_z", p.beta_z}};
    if (auto s = critical_sigma(p)) o["sigma"] = *s;
    obs.push_back(o);
  }
  j["observers"] = obs;
  ordered_json pred = ordered_json::array();
  for (const auto& p : r.predictions) {
    pred.push_back({{"agent", p.agent + 1},
                    {"frequency", p.frequency},
                    {"residual_gain", p.magnitude}});
  }
  j["predicted_residuals"] = pred;
  j["warnings"] = r.warnings;
  return j;
}

std::string format_report(const DesignReport& r) {
  std::ostringstream os;
  char buf[256];
  os << "Formation design report\n";
  std::snprintf(buf, sizeof buf, "  plant: alpha_p=%g alpha_v=%g n=%d\n",
                r.plant.alpha_p, r.plant.alpha_v, r.plant.n_axes);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "  step 1  feasibility: %s (max residual %.3e, eps_f %.1e, "
                "%zu grid points on [%g, %g])\n",
                r.feasible ? "ok" : "FAILED", r.feasibility_max, r.eps_f,
                r.grid_points, r.grid_start, r.grid_end);
  os << buf;
  os << "  spectrum:";
  for (const auto& l : r.eigenvalues) {
    std::snprintf(buf, sizeof buf, " %.4f%+.4fi", l.real(), l.imag());
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "\n  Re(lambda_2) = %.6f%s\n", r.lambda2_used,
                r.lambda2_overridden ? " (override)" : "");
  os << buf;
  os << "  u_bar_1 =";
  for (Eigen::Index i = 0; i < r.u_bar_1.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.6f", r.u_bar_1[i]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "\n  step 2  P_hat = [[%.6f, %.6f], [%.6f, %.6f]]  residual %.2e\n",
                r.p_hat(0, 0), r.p_hat(0, 1), r.p_hat(1, 0), r.p_hat(1, 1),
                r.are_residual);
  os << buf;
  std::snprintf(buf, sizeof buf, "  step 3  K_u = [%.4f, %.4f] (x) I_%d\n",
                r.gain.k_p, r.gain.k_v, r.plant.n_axes);
  os << buf;
  os << "  Hurwitz margins:";
  for (const auto& m : r.hurwitz) {
    std::snprintf(buf, sizeof buf, " %.4f", m.max_real_part);
    os << buf;
  }
  os << "\n  step 4  observers:";
  for (const auto& p : r.eso) {
    if (auto s = critical_sigma(p)) {
      std::snprintf(buf, sizeof buf, " sigma=%g", *s);
    } else {
      std::snprintf(buf, sizeof buf, " (beta_g=%g, beta_z=%g)", p.beta_g, p.beta_z);
    }
    os << buf;
  }
  os << "\n";
  for (const auto& p : r.predictions) {
    std::snprintf(buf, sizeof buf, "    agent %d  w=%-8g |1-G| = %.5f\n",
                  p.agent + 1, p.frequency, p.magnitude);
    os << buf;
  }
  for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace esoform
