#include "esoform/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "esoform/errors.hpp"

namespace esoform {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void only_keys(const json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) fail(where + "." + key, "unknown key");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where + "." + key, "missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) fail(where, "must be positive");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

AxisSignal parse_axis(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of sinusoid terms");
  AxisSignal axis;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string w = where + "[" + std::to_string(k) + "]";
    only_keys(j[k], w, {"amplitude", "angular_frequency", "phase", "offset"});
    Sinusoid s;
    if (j[k].contains("amplitude")) s.amplitude = number(j[k]["amplitude"], w + ".amplitude");
    if (j[k].contains("angular_frequency")) {
      s.angular_frequency = number(j[k]["angular_frequency"], w + ".angular_frequency");
    }
    if (j[k].contains("phase")) s.phase = number(j[k]["phase"], w + ".phase");
    if (j[k].contains("offset")) s.offset = number(j[k]["offset"], w + ".offset");
    axis.terms.push_back(s);
  }
  return axis;
}

std::vector<AxisSignal> parse_axes(const json& j, int n_axes, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n_axes) {
    fail(where, "expected " + std::to_string(n_axes) + " axis signals");
  }
  std::vector<AxisSignal> out;
  for (int d = 0; d < n_axes; ++d) {
    out.push_back(parse_axis(j[d], where + "[" + std::to_string(d) + "]"));
  }
  return out;
}

json axis_to_json(const AxisSignal& a) {
  json arr = json::array();
  for (const auto& s : a.terms) {
    arr.push_back({{"amplitude", s.amplitude},
                   {"angular_frequency", s.angular_frequency},
                   {"phase", s.phase},
                   {"offset", s.offset}});
  }
  return arr;
}

std::vector<double> per_agent(const json& j, int n_agents, const std::string& where) {
  if (j.is_number()) return std::vector<double>(n_agents, positive(j, where));
  if (!j.is_array() || static_cast<int>(j.size()) != n_agents) {
    fail(where, "expected a number or an array of " + std::to_string(n_agents));
  }
  std::vector<double> v;
  for (int i = 0; i < n_agents; ++i) {
    v.push_back(positive(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return v;
}

Eigen::MatrixXd parse_topology(const json& j, const std::string& where) {
  only_keys(j, where, {"n_agents", "weights", "edges"});
  const int n = integer(require(j, "n_agents", where), where + ".n_agents");
  if (n < 2) fail(where + ".n_agents", "must be >= 2");
  if (j.contains("weights") == j.contains("edges")) {
    fail(where, "give exactly one of 'weights' or 'edges'");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (j.contains("weights")) {
    const auto& m = j["weights"];
    if (!m.is_array() || static_cast<int>(m.size()) != n) {
      fail(where + ".weights", "expected an N x N matrix");
    }
    for (int i = 0; i < n; ++i) {
      if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) {
        fail(where + ".weights[" + std::to_string(i) + "]", "expected N entries");
      }
      for (int k = 0; k < n; ++k) {
        w(i, k) = number(m[i][k], where + ".weights[" + std::to_string(i) + "][" +
                                      std::to_string(k) + "]");
      }
    }
  } else {
    const auto& edges = j["edges"];
    if (!edges.is_array()) fail(where + ".edges", "expected an array");
    std::vector<Digraph::Edge> list;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string e = where + ".edges[" + std::to_string(k) + "]";
      only_keys(edges[k], e, {"from", "to", "weight"});
      const int from = integer(require(edges[k], "from", e), e + ".from");
      const int to = integer(require(edges[k], "to", e), e + ".to");
      if (from < 1 || from > n || to < 1 || to > n) fail(e, "agent index out of 1..N");
      const double weight =
          edges[k].contains("weight") ? number(edges[k]["weight"], e + ".weight") : 1.0;
      list.push_back({from - 1, to - 1, weight});
    }
    try {
      w = Digraph::from_edges(n, list).weights();
    } catch (const InvalidArgument& ex) {
      fail(where + ".edges", ex.what());
    }
  }
  try {
    (void)Digraph(w);
  } catch (const InvalidArgument& ex) {
    fail(where, ex.what());
  }
  return w;
}

}  // namespace

FormationSpec parse_formation(const json& j, int n_agents, int n_axes,
                              const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (j.contains("preset")) {
    const std::string preset = j["preset"].is_string() ? j["preset"].get<std::string>() : "";
    if (preset == "hexagon") {
      only_keys(j, where, {"preset", "scale", "phase_step", "angular_frequency"});
      if (n_axes != 3) fail(where + ".preset", "hexagon preset requires n_axes = 3");
      const double scale = j.contains("scale") ? number(j["scale"], where + ".scale") : 3.0;
      const double step = j.contains("phase_step") ? number(j["phase_step"], where + ".phase_step")
                                                   : std::numbers::pi / 3.0;
      const double w = j.contains("angular_frequency")
                           ? number(j["angular_frequency"], where + ".angular_frequency")
                           : 1.0;
      return hexagon_formation(n_agents, scale, step, w);
    }
    if (preset == "static_hexagon") {
      only_keys(j, where, {"preset", "scale", "phase_step"});
      if (n_axes != 3) fail(where + ".preset", "static_hexagon preset requires n_axes = 3");
      const double scale = j.contains("scale") ? number(j["scale"], where + ".scale") : 3.0;
      const double step = j.contains("phase_step") ? number(j["phase_step"], where + ".phase_step")
                                                   : std::numbers::pi / 3.0;
      return static_hexagon_formation(n_agents, scale, step);
    }
    if (preset == "zero") {
      only_keys(j, where, {"preset"});
      return zero_formation(n_agents, n_axes);
    }
    fail(where + ".preset", "unknown formation preset");
  }
  only_keys(j, where, {"agents"});
  const auto& agents = require(j, "agents", where);
  if (!agents.is_array() || static_cast<int>(agents.size()) != n_agents) {
    fail(where + ".agents", "expected " + std::to_string(n_agents) + " entries");
  }
  FormationSpec spec;
  spec.n_axes = n_axes;
  for (int i = 0; i < n_agents; ++i) {
    const std::string a = where + ".agents[" + std::to_string(i) + "]";
    only_keys(agents[i], a, {"position", "velocity"});
    AgentFormation f;
    f.position = parse_axes(require(agents[i], "position", a), n_axes, a + ".position");
    f.velocity = parse_axes(require(agents[i], "velocity", a), n_axes, a + ".velocity");
    spec.agents.push_back(std::move(f));
  }
  return spec;
}

DisturbanceSpec parse_disturbance(const json& j, int n_agents, int n_axes,
                                  const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (j.contains("preset")) {
    only_keys(j, where, {"preset"});
    const std::string preset = j["preset"].is_string() ? j["preset"].get<std::string>() : "";
    if (preset == "none") return zero_disturbance(n_agents, n_axes);
    if (preset == "biased_sine") {
      if (n_axes != 3) fail(where + ".preset", "biased_sine preset requires n_axes = 3");
      return biased_sine_disturbance(n_agents);
    }
    fail(where + ".preset", "unknown disturbance preset");
  }
  only_keys(j, where, {"agents"});
  const auto& agents = require(j, "agents", where);
  if (!agents.is_array() || static_cast<int>(agents.size()) != n_agents) {
    fail(where + ".agents", "expected " + std::to_string(n_agents) + " entries");
  }
  DisturbanceSpec spec;
  spec.n_axes = n_axes;
  for (int i = 0; i < n_agents; ++i) {
    spec.agents.push_back(
        parse_axes(agents[i], n_axes, where + ".agents[" + std::to_string(i) + "]"));
  }
  return spec;
}

json formation_to_json(const FormationSpec& spec) {
  json agents = json::array();
  for (const auto& a : spec.agents) {
    json pos = json::array();
    json vel = json::array();
    for (const auto& s : a.position) pos.push_back(axis_to_json(s));
    for (const auto& s : a.velocity) vel.push_back(axis_to_json(s));
    agents.push_back({{"position", pos}, {"velocity", vel}});
  }
  return {{"agents", agents}};
}

json disturbance_to_json(const DisturbanceSpec& spec) {
  json agents = json::array();
  for (const auto& a : spec.agents) {
    json axes = json::array();
    for (const auto& s : a) axes.push_back(axis_to_json(s));
    agents.push_back(axes);
  }
  return {{"agents", agents}};
}

ScenarioConfig parse_scenario(const json& j) {
  const std::string root = "config";
  only_keys(j, root,
            {"version", "name", "seed", "plant", "topology", "formation",
             "disturbance", "observer", "initial_state", "feasibility",
             "integrator", "lambda2_override", "compensation"});
  const int version = integer(require(j, "version", root), root + ".version");
  if (version != kScenarioVersion) {
    fail(root + ".version", "unsupported version " + std::to_string(version));
  }

  ScenarioConfig cfg;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(root + ".name", "expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_string()) fail(root + ".seed", "expected a string");
    cfg.seed = j["seed"].get<std::string>();
  }

  const auto& plant = require(j, "plant", root);
  only_keys(plant, root + ".plant", {"alpha_p", "alpha_v", "n_axes"});
  cfg.plant.alpha_p = number(require(plant, "alpha_p", root + ".plant"), root + ".plant.alpha_p");
  cfg.plant.alpha_v = number(require(plant, "alpha_v", root + ".plant"), root + ".plant.alpha_v");
  cfg.plant.n_axes = integer(require(plant, "n_axes", root + ".plant"), root + ".plant.n_axes");
  if (cfg.plant.n_axes < 1) fail(root + ".plant.n_axes", "must be >= 1");
  const int n = cfg.plant.n_axes;

  cfg.weights = parse_topology(require(j, "topology", root), root + ".topology");
  const int agents = static_cast<int>(cfg.weights.rows());

  cfg.formation = parse_formation(require(j, "formation", root), agents, n, root + ".formation");
  cfg.formation_json = formation_to_json(cfg.formation);
  if (j.contains("disturbance")) {
    cfg.disturbance = parse_disturbance(j["disturbance"], agents, n, root + ".disturbance");
  } else {
    cfg.disturbance = zero_disturbance(agents, n);
  }
  cfg.disturbance_json = disturbance_to_json(cfg.disturbance);

  if (j.contains("observer")) {
    const auto& obs = j["observer"];
    const std::string w = root + ".observer";
    only_keys(obs, w, {"sigma", "beta_g", "beta_z"});
    if (obs.contains("sigma")) {
      if (obs.contains("beta_g") || obs.contains("beta_z")) {
        fail(w, "give either sigma or (beta_g, beta_z), not both");
      }
      for (double s : per_agent(obs["sigma"], agents, w + ".sigma")) {
        cfg.eso.push_back(EsoParams::from_sigma(s));
      }
    } else {
      const auto bg = per_agent(require(obs, "beta_g", w), agents, w + ".beta_g");
      const auto bz = per_agent(require(obs, "beta_z", w), agents, w + ".beta_z");
      for (int i = 0; i < agents; ++i) cfg.eso.push_back(EsoParams::from_betas(bg[i], bz[i]));
    }
  } else {
    cfg.eso.assign(agents, EsoParams::from_sigma(10.0));
  }

  const auto& x0 = require(j, "initial_state", root);
  if (!x0.is_array() || static_cast<int>(x0.size()) != agents) {
    fail(root + ".initial_state", "expected " + std::to_string(agents) + " rows");
  }
  cfg.initial_state.resize(agents, 2 * n);
  for (int i = 0; i < agents; ++i) {
    const std::string w = root + ".initial_state[" + std::to_string(i) + "]";
    if (!x0[i].is_array() || static_cast<int>(x0[i].size()) != 2 * n) {
      fail(w, "expected 2n = " + std::to_string(2 * n) + " values [p..., v...]");
    }
    for (int k = 0; k < 2 * n; ++k) {
      cfg.initial_state(i, k) = number(x0[i][k], w + "[" + std::to_string(k) + "]");
    }
  }

  if (j.contains("feasibility")) {
    const auto& f = j["feasibility"];
    only_keys(f, root + ".feasibility", {"eps_f", "grid_step"});
    if (f.contains("eps_f")) cfg.eps_f = positive(f["eps_f"], root + ".feasibility.eps_f");
    if (f.contains("grid_step")) {
      cfg.feasibility_step = positive(f["grid_step"], root + ".feasibility.grid_step");
    }
  }

  if (j.contains("integrator")) {
    const auto& in = j["integrator"];
    const std::string w = root + ".integrator";
    only_keys(in, w, {"dt", "horizon", "decimation"});
    if (in.contains("dt")) cfg.integrator.dt = positive(in["dt"], w + ".dt");
    if (in.contains("horizon")) cfg.integrator.horizon = positive(in["horizon"], w + ".horizon");
    if (in.contains("decimation")) {
      cfg.integrator.decimation = integer(in["decimation"], w + ".decimation");
      if (cfg.integrator.decimation < 1) fail(w + ".decimation", "must be >= 1");
    }
    if (cfg.integrator.dt > cfg.integrator.horizon) fail(w + ".dt", "exceeds the horizon");
  }

  if (j.contains("lambda2_override") && !j["lambda2_override"].is_null()) {
    cfg.lambda2_override = positive(j["lambda2_override"], root + ".lambda2_override");
  }
  if (j.contains("compensation")) {
    if (!j["compensation"].is_boolean()) fail(root + ".compensation", "expected a boolean");
    cfg.compensation = j["compensation"].get<bool>();
  }
  return cfg;
}

json load_scenario_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
}

namespace {

json directed_ring(int n_agents) {
  json edges = json::array();
  for (int i = 1; i <= n_agents; ++i) {
    edges.push_back({{"from", i}, {"to", i % n_agents + 1}, {"weight", 1.0}});
  }
  return {{"n_agents", n_agents}, {"edges", edges}};
}

json six_agent_initial_state() {
  return json::array({
      {0.6, 1.2, 0.5, -1.2, -0.3, 0.8},
      {-1.5, -0.3, 1.8, -1.6, 2.3, 1.1},
      {2.1, 0.8, -1.6, 0.3, -1.9, 2.5},
      {3.8, 1.7, -2.6, 1.8, -3.3, 1.5},
      {4.5, 1.9, -1.2, -2.9, 3.5, -1.4},
      {-4.2, 2.9, 3.8, -5.1, -3.5, 2.7},
  });
}

json six_agent_base(const std::string& name) {
  return {
      {"version", kScenarioVersion},
      {"name", name},
      {"seed", "ring6"},
      {"plant", {{"alpha_p", -0.01}, {"alpha_v", 0.0}, {"n_axes", 3}}},
      {"topology", directed_ring(6)},
      {"formation", {{"preset", "hexagon"}, {"scale", 3.0},
                     {"phase_step", std::numbers::pi / 3.0},
                     {"angular_frequency", 1.0}}},
      {"disturbance", {{"preset", "biased_sine"}}},
      {"observer", {{"sigma", 10.0}}},
      {"initial_state", six_agent_initial_state()},
      {"feasibility", {{"eps_f", 1e-6}, {"grid_step", 0.01}}},
      {"integrator", {{"dt", 1e-3}, {"horizon", 20.0}, {"decimation", 10}}},
  };
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"reference", "reference_gain", "undisturbed", "uncompensated"};
}

json preset_json(const std::string& name) {
  if (name == "reference") return six_agent_base(name);
  if (name == "reference_gain") {
    auto j = six_agent_base(name);
    j["lambda2_override"] = 0.9293;
    return j;
  }
  if (name == "undisturbed") {
    auto j = six_agent_base(name);
    j["formation"] = {{"preset", "static_hexagon"}, {"scale", 3.0},
                      {"phase_step", std::numbers::pi / 3.0}};
    j["disturbance"] = {{"preset", "none"}};
    return j;
  }
  if (name == "uncompensated") {
    auto j = six_agent_base(name);
    j["compensation"] = false;
    return j;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

DesignInputs design_inputs(const ScenarioConfig& cfg) {
  DesignInputs in;
  in.weights = cfg.weights;
  in.plant = cfg.plant;
  in.formation = cfg.formation;
  in.eps_f = cfg.eps_f;
  in.feasibility_grid = uniform_grid(0.0, cfg.integrator.horizon, cfg.feasibility_step);
  in.eso = cfg.eso;
  in.disturbance = cfg.disturbance;
  in.lambda2_override = cfg.lambda2_override;
  return in;
}

SimulationSetup simulation_setup(const ScenarioConfig& cfg, const DesignReport& report) {
  SimulationSetup s;
  s.weights = cfg.weights;
  s.plant = cfg.plant;
  s.gain = report.gain;
  s.u_bar_1 = report.u_bar_1;
  s.formation = cfg.formation;
  s.disturbance = cfg.disturbance;
  s.eso = report.eso;
  s.initial_state = cfg.initial_state;
  s.integrator = cfg.integrator;
  s.compensation = cfg.compensation;
  return s;
}

}  // namespace esoform
