#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "esoform/center.hpp"
#include "esoform/eso.hpp"
#include "esoform/riccati.hpp"
#include "esoform/signals.hpp"
#include "esoform/simulator.hpp"

namespace esoform {

inline constexpr const char* kTraceFormat = "esoform-trace";
inline constexpr int kTraceVersion = 1;

/// Everything needed to post-process a trace without its config.
struct TraceMetadata {
  std::string name;
  PlantParams plant;
  Eigen::RowVectorXd u_bar_1;
  GainRow gain;
  double lambda2_used = 0.0;
  std::vector<EsoParams> eso;
  FormationSpec formation;
  DisturbanceSpec disturbance;
};

/// Layout:
///   # esoform-trace v1
///   # meta {json}
///   t,<per agent: p, v, u, w, z per axis>,<kappa 2n>,e
///   rows (9 significant digits)
///   # end <row count>
void write_trace_csv(std::ostream& os, const SimulationTrace& trace,
                     const TraceMetadata& meta);

struct LoadedTrace {
  SimulationTrace trace;
  TraceMetadata meta;
};

/// Throws FormatError on a version mismatch, malformed or truncated file.
[[nodiscard]] LoadedTrace read_trace_csv(std::istream& is);
[[nodiscard]] LoadedTrace read_trace_csv(const std::filesystem::path& path);

[[nodiscard]] std::vector<std::string> trace_columns(int n_agents, int n_axes);

/// t, c0, cz, cf, kappa_hat (2n each), r.
void write_center_csv(std::ostream& os, const CenterDecomposition& dec, int n_axes);

/// printf("%.9g") formatting used for every CSV number.
[[nodiscard]] std::string format_number(double v);

}  // namespace esoform
