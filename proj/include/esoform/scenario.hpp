#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "esoform/design.hpp"
#include "esoform/eso.hpp"
#include "esoform/riccati.hpp"
#include "esoform/signals.hpp"
#include "esoform/simulator.hpp"

namespace esoform {

inline constexpr int kScenarioVersion = 1;

/// A validated scenario. See README.md for the JSON schema.
struct ScenarioConfig {
  std::string name;
  std::string seed;
  PlantParams plant;
  Eigen::MatrixXd weights;
  FormationSpec formation;
  DisturbanceSpec disturbance;
  std::vector<EsoParams> eso;
  Eigen::MatrixXd initial_state;
  double eps_f = 1e-6;
  double feasibility_step = 0.01;
  IntegratorSettings integrator;
  std::optional<double> lambda2_override;
  bool compensation = true;

  // Normalized echo of the formation/disturbance sections, embedded in traces.
  nlohmann::json formation_json;
  nlohmann::json disturbance_json;
};

/// Throws ConfigError naming the offending field.
[[nodiscard]] ScenarioConfig parse_scenario(const nlohmann::json& j);
[[nodiscard]] nlohmann::json load_scenario_json(const std::filesystem::path& path);

/// Names of the bundled scenarios.
[[nodiscard]] std::vector<std::string> preset_names();
/// Bundled scenario as JSON; throws ConfigError for an unknown name.
[[nodiscard]] nlohmann::json preset_json(const std::string& name);

[[nodiscard]] DesignInputs design_inputs(const ScenarioConfig& cfg);
/// Closed-loop setup driven by a completed design.
[[nodiscard]] SimulationSetup simulation_setup(const ScenarioConfig& cfg,
                                               const DesignReport& report);

// Signal (de)serialization shared with the trace format.
[[nodiscard]] FormationSpec parse_formation(const nlohmann::json& j, int n_agents,
                                            int n_axes, const std::string& where);
[[nodiscard]] DisturbanceSpec parse_disturbance(const nlohmann::json& j,
                                                int n_agents, int n_axes,
                                                const std::string& where);
[[nodiscard]] nlohmann::json formation_to_json(const FormationSpec& spec);
[[nodiscard]] nlohmann::json disturbance_to_json(const DisturbanceSpec& spec);

}  // namespace esoform
