#include "esoform/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "esoform/center.hpp"
#include "esoform/design.hpp"
#include "esoform/errors.hpp"
#include "esoform/scenario.hpp"
#include "esoform/simulator.hpp"
#include "esoform/trace_io.hpp"

namespace esoform {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScenarioOptions {
  std::string config;
  std::string preset;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> lambda2_override;
  std::optional<double> eps_f;
};

void add_scenario_options(CLI::App* cmd, ScenarioOptions& o) {
  cmd->add_option("--config", o.config, "Scenario JSON file");
  cmd->add_option("--preset", o.preset, "Bundled scenario (see `esoform preset`)");
  cmd->add_option("--dt", o.dt, "Override integrator.dt");
  cmd->add_option("--horizon", o.horizon, "Override integrator.horizon");
  cmd->add_option("--lambda2-override", o.lambda2_override,
                  "Synthesize the gain with this Re(lambda_2)");
  cmd->add_option("--eps-f", o.eps_f, "Override feasibility.eps_f");
}

json scenario_json(const ScenarioOptions& o) {
  if (o.config.empty() == o.preset.empty()) {
    throw ConfigError("give exactly one of --config or --preset");
  }
  json j = o.config.empty() ? preset_json(o.preset) : load_scenario_json(o.config);
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (o.dt) j["integrator"]["dt"] = *o.dt;
  if (o.horizon) j["integrator"]["horizon"] = *o.horizon;
  if (o.lambda2_override) j["lambda2_override"] = *o.lambda2_override;
  if (o.eps_f) j["feasibility"]["eps_f"] = *o.eps_f;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ConfigError(path.string() + ": cannot write");
}

// Files are written under temporary names and renamed only when every output
// of a command succeeded.
class StagedOutput {
 public:
  explicit StagedOutput(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;
  ~StagedOutput() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : staged_) fs::remove(dir_ / (p + ".partial"), ec);
  }

  std::ofstream open(const std::string& name) {
    staged_.push_back(name);
    std::ofstream f(dir_ / (name + ".partial"), std::ios::binary);
    if (!f) throw ConfigError((dir_ / name).string() + ": cannot write");
    return f;
  }
  void commit() {
    for (const auto& p : staged_) fs::rename(dir_ / (p + ".partial"), dir_ / p);
    committed_ = true;
  }
  [[nodiscard]] const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> staged_;
  bool committed_ = false;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Offline plots for an esoform simulation directory: trace.csv and center.csv."""
import sys
import pandas as pd
import matplotlib.pyplot as plt

out = sys.argv[1] if len(sys.argv) > 1 else "."
trace = pd.read_csv(f"{out}/trace.csv", comment="#")
center = pd.read_csv(f"{out}/center.csv")
agents = sorted({c.split("_")[0] for c in trace.columns if c.startswith("a")},
                key=lambda a: int(a[1:]))

for kind, label in (("p", "position"), ("v", "velocity")):
    fig = plt.figure(figsize=(12, 3.5))
    horizon = trace["t"].iloc[-1]
    for k, frac in enumerate((0.0, 0.5, 0.75, 1.0)):
        row = trace.iloc[(trace["t"] - frac * horizon).abs().idxmin()]
        ax = fig.add_subplot(1, 4, k + 1, projection="3d")
        for a in agents:
            ax.scatter(row[f"{a}_{kind}1"], row[f"{a}_{kind}2"], row[f"{a}_{kind}3"], label=a)
        ax.scatter(row[f"kappa_{kind}1"], row[f"kappa_{kind}2"], row[f"kappa_{kind}3"],
                   marker="*", s=80, c="k", label="center")
        ax.set_title(f"t = {row['t']:.1f} s")
    fig.suptitle(f"{label} snapshots")
    fig.savefig(f"{out}/{label}_snapshots.png", dpi=120)

fig = plt.figure(figsize=(10, 4))
for k, kind in enumerate(("p", "v")):
    ax = fig.add_subplot(1, 2, k + 1, projection="3d")
    ax.plot(trace[f"kappa_{kind}1"], trace[f"kappa_{kind}2"], trace[f"kappa_{kind}3"])
    ax.set_title(f"formation center ({kind})")
fig.savefig(f"{out}/center_curves.png", dpi=120)

fig, ax = plt.subplots(1, 2, figsize=(10, 3.5))
ax[0].semilogy(trace["t"], trace["e"])
ax[0].set_xlabel("t [s]"); ax[0].set_ylabel("e(t)")
ax[1].semilogy(center["t"], center["r"].clip(lower=1e-16))
ax[1].set_xlabel("t [s]"); ax[1].set_ylabel("center decomposition residual")
fig.tight_layout()
fig.savefig(f"{out}/errors.png", dpi=120)
)PY";

TraceMetadata trace_metadata(const ScenarioConfig& cfg, const DesignReport& report) {
  TraceMetadata m;
  m.name = cfg.name;
  m.plant = cfg.plant;
  m.u_bar_1 = report.u_bar_1;
  m.gain = report.gain;
  m.lambda2_used = report.lambda2_used;
  m.eso = report.eso;
  m.formation = cfg.formation;
  m.disturbance = cfg.disturbance;
  return m;
}

struct SimulationSummary {
  json summary;
  double final_error = 0.0;
  double tail_max_error = 0.0;
};

SimulationSummary simulate_into(const ScenarioConfig& cfg, const fs::path& out_dir,
                                bool plot_script, std::ostream& log) {
  const DesignReport report = design(design_inputs(cfg));
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  const double dt_max = recommended_max_dt(report.eso);
  if (cfg.integrator.dt > dt_max) {
    log << "warning: dt=" << cfg.integrator.dt << " exceeds the RK4 guidance "
        << dt_max << " for the fastest observer\n";
  }

  const Simulator sim(simulation_setup(cfg, report));
  const SimulationTrace trace = sim.run();
  const CenterDecomposition dec =
      decompose_center(trace, report.u_bar_1, cfg.plant, cfg.formation);
  const CenterBoundReport th = verify_center_bound(dec, 1e-2);

  const double horizon = trace.samples.back().t;
  SimulationSummary s;
  s.final_error = trace.samples.back().error;
  s.tail_max_error = trace.max_error(0.75 * horizon, horizon);
  s.summary = {
      {"name", cfg.name},
      {"seed", cfg.seed},
      {"horizon", horizon},
      {"dt", cfg.integrator.dt},
      {"output_samples", trace.samples.size()},
      {"final_error", s.final_error},
      {"max_error_last_quarter", {{"t_start", 0.75 * horizon},
                                  {"t_end", horizon},
                                  {"value", s.tail_max_error}}},
      {"gain_row", {report.gain.k_p, report.gain.k_v}},
      {"lambda2_used", report.lambda2_used},
      {"lambda2_laplacian", report.lambda2_re},
      {"lambda2_overridden", report.lambda2_overridden},
      {"compensation", cfg.compensation},
      {"center_max_residual", th.max_residual},
  };

  StagedOutput staged(out_dir);
  {
    auto f = staged.open("trace.csv");
    write_trace_csv(f, trace, trace_metadata(cfg, report));
  }
  {
    auto f = staged.open("center.csv");
    write_center_csv(f, dec, cfg.plant.n_axes);
  }
  staged.open("design.json") << to_json(report).dump(2) << "\n";
  staged.open("summary.json") << s.summary.dump(2) << "\n";
  if (plot_script) staged.open("plot_trace.py") << kPlotScript;
  staged.commit();
  return s;
}

int cmd_design(const ScenarioOptions& opts, const std::string& out_path,
               std::ostream& out) {
  const ScenarioConfig cfg = parse_scenario(scenario_json(opts));
  const DesignReport report = design(design_inputs(cfg));
  out << format_report(report);
  if (!out_path.empty()) {
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, to_json(report).dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_simulate(const ScenarioOptions& opts, const std::string& out_dir,
                 bool plot_script, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = parse_scenario(scenario_json(opts));
  const auto s = simulate_into(cfg, out_dir, plot_script, err);
  out << "simulated '" << cfg.name << "' -> " << out_dir << "\n"
      << "  K_u row          = [" << fmt("%.4f", s.summary["gain_row"][0].get<double>())
      << ", " << fmt("%.4f", s.summary["gain_row"][1].get<double>()) << "]\n"
      << "  Re(lambda_2)     = " << fmt("%.6f", s.summary["lambda2_used"].get<double>())
      << (s.summary["lambda2_overridden"].get<bool>() ? " (override)" : "") << "\n"
      << "  final e(t)       = " << fmt("%.6g", s.final_error) << "\n"
      << "  max e on [3T/4,T] = " << fmt("%.6g", s.tail_max_error) << "\n"
      << "  center residual  = "
      << fmt("%.3g", s.summary["center_max_residual"].get<double>()) << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& trace_path, double eps, double t_check,
                const std::string& out_dir, std::ostream& out) {
  const LoadedTrace loaded = read_trace_csv(fs::path(trace_path));
  const auto& meta = loaded.meta;
  const auto& trace = loaded.trace;
  const CenterDecomposition dec =
      decompose_center(trace, meta.u_bar_1, meta.plant, meta.formation);
  const CenterBoundReport th = verify_center_bound(dec, eps, t_check);

  const int n = trace.n_axes;
  const double horizon = trace.samples.back().t;
  const double tail = trace.samples.front().t + 0.75 * (horizon - trace.samples.front().t);

  json eso_rows = json::array();
  std::ostringstream table;
  table << "  agent axis  predicted_bound  measured_peak\n";
  for (int i = 0; i < trace.n_agents; ++i) {
    for (int d = 0; d < n; ++d) {
      double bound = 0.0;
      for (const auto& term : meta.disturbance.agents[i][d].terms) {
        if (term.angular_frequency != 0.0) {
          bound += std::abs(term.amplitude) *
                   predicted_residual(meta.eso[i], std::abs(term.angular_frequency));
        }
      }
      double peak = 0.0;
      for (const auto& s : trace.samples) {
        if (s.t >= tail) peak = std::max(peak, std::abs(s.omega(i, d) - s.z(i, d)));
      }
      eso_rows.push_back({{"agent", i + 1}, {"axis", d + 1},
                          {"predicted_bound", bound}, {"measured_peak", peak}});
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %5d %4d  %15.6f  %13.6f\n", i + 1, d + 1, bound, peak);
      table << buf;
    }
  }
  json freq_rows = json::array();
  std::ostringstream freq;
  for (double w : meta.disturbance.frequencies()) {
    for (int i = 0; i < trace.n_agents; ++i) {
      const double m = predicted_residual(meta.eso[i], w);
      freq_rows.push_back({{"agent", i + 1}, {"frequency", w}, {"residual_gain", m}});
      freq << "  agent " << i + 1 << "  w=" << w << "  |1-G(jw)| = " << fmt("%.5f", m) << "\n";
    }
  }

  out << "Formation center check for '" << meta.name << "' (" << trace.samples.size()
      << " samples)\n"
      << "  max ||kappa - c0 - cz - cf|| for t >= " << t_check << ": "
      << fmt("%.3e", th.max_residual) << "\n";
  if (th.t_eps) {
    out << "  eps = " << eps << " reached from t_eps = " << *th.t_eps << "\n";
  } else {
    out << "  eps = " << eps << " NOT reached by the end of the trace\n";
  }
  out << "Observer residual per frequency\n" << freq.str()
      << "Steady-state |w - z| over the last quarter\n" << table.str();

  if (!out_dir.empty()) {
    StagedOutput staged(out_dir);
    {
      auto f = staged.open("residual.csv");
      f << "t,r\n";
      for (std::size_t k = 0; k < dec.times.size(); ++k) {
        f << format_number(dec.times[k]) << ',' << format_number(dec.residual[k]) << "\n";
      }
    }
    json report = {{"name", meta.name},
                   {"eps", eps},
                   {"t_check", t_check},
                   {"max_residual", th.max_residual},
                   {"t_eps", th.t_eps ? json(*th.t_eps) : json(nullptr)},
                   {"passed", th.passed()},
                   {"observer_frequency_table", freq_rows},
                   {"observer_steady_state", eso_rows}};
    staged.open("analysis.json") << report.dump(2) << "\n";
    staged.commit();
  }
  return th.passed() ? kExitOk : kExitNumerical;
}

int cmd_sweep(const ScenarioOptions& opts, const std::string& out_dir,
              const std::string& param, const std::vector<double>& values, int jobs,
              std::ostream& out, std::ostream& err) {
  static const std::map<std::string, std::vector<std::string>> kPaths = {
      {"sigma", {"observer", "sigma"}},
      {"dt", {"integrator", "dt"}},
      {"horizon", {"integrator", "horizon"}},
      {"lambda2_override", {"lambda2_override"}},
      {"eps_f", {"feasibility", "eps_f"}},
  };
  const auto path = kPaths.find(param);
  if (path == kPaths.end()) throw ConfigError("--param: unsupported sweep parameter '" + param + "'");
  if (values.empty()) throw ConfigError("--values: need at least one value");

  const json base = scenario_json(opts);
  std::vector<ScenarioConfig> configs;
  std::vector<std::string> labels;
  for (double v : values) {
    json j = base;
    if (param == "sigma") j.erase("observer");
    json* node = &j;
    for (const auto& key : path->second) node = &(*node)[key];
    *node = v;
    configs.push_back(parse_scenario(j));
    labels.push_back(param + "_" + format_number(v));
  }

  struct Result {
    std::string label;
    std::optional<SimulationSummary> summary;
    std::string error_kind;
    std::string log;
  };
  std::vector<Result> results(configs.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < configs.size(); start += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t k = start; k < std::min(configs.size(), start + workers); ++k) {
      batch.push_back(std::async(std::launch::async, [&, k] {
        std::ostringstream log;
        results[k].label = labels[k];
        try {
          results[k].summary =
              simulate_into(configs[k], fs::path(out_dir) / labels[k], false, log);
        } catch (const Error& ex) {
          results[k].error_kind = ex.kind();
          log << "error[" << ex.kind() << "]: " << ex.what() << "\n";
        }
        results[k].log = log.str();
      }));
    }
    for (auto& f : batch) f.get();
  }

  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << param << ",status,final_error,max_error_last_quarter\n";
  bool all_ok = true;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    err << r.log;
    csv << format_number(values[k]) << ',';
    if (r.summary) {
      csv << "ok," << format_number(r.summary->final_error) << ','
          << format_number(r.summary->tail_max_error) << "\n";
      out << r.label << ": final e = " << fmt("%.6g", r.summary->final_error) << "\n";
    } else {
      all_ok = false;
      csv << r.error_kind << ",,\n";
      out << r.label << ": " << r.error_kind << "\n";
    }
  }
  return all_ok ? kExitOk : kExitNumerical;
}

int exit_code_for(const Error& ex) {
  const std::string kind = ex.kind();
  if (kind == "Infeasible") return kExitInfeasible;
  if (kind == "NoSpanningTree" || kind == "InvalidLambda2") return kExitNoSpanningTree;
  if (kind == "NonFiniteState" || kind == "NotHurwitz" || kind == "NotPositiveDefinite") {
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust time-varying formation design and simulation"};
  app.require_subcommand(1);

  ScenarioOptions design_opts;
  std::string design_out;
  auto* design_cmd = app.add_subcommand("design", "Run the four-step gain design");
  add_scenario_options(design_cmd, design_opts);
  design_cmd->add_option("--out", design_out, "Write the JSON report here");

  ScenarioOptions sim_opts;
  std::string sim_out;
  bool plot_script = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Design, simulate and write traces");
  add_scenario_options(sim_cmd, sim_opts);
  sim_cmd->add_option("--out", sim_out, "Output directory")->required();
  sim_cmd->add_flag("--plot-script", plot_script, "Also write plot_trace.py");

  std::string trace_path;
  std::string analyze_out;
  double eps = 1e-2;
  double t_check = 0.0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Verify the center decomposition of a trace");
  analyze_cmd->add_option("--trace", trace_path, "trace.csv from simulate")->required();
  analyze_cmd->add_option("--eps", eps, "Residual bound");
  analyze_cmd->add_option("--t-check", t_check, "Report the sup residual from this time");
  analyze_cmd->add_option("--out", analyze_out, "Write residual.csv and analysis.json here");

  ScenarioOptions sweep_opts;
  std::string sweep_out;
  std::string sweep_param;
  std::vector<double> sweep_values;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Simulate a scenario over a parameter list");
  add_scenario_options(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();
  sweep_cmd->add_option("--param", sweep_param,
                        "sigma | dt | horizon | lambda2_override | eps_f")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required()->delimiter(',');
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs");

  std::string preset_name;
  std::string preset_out;
  auto* preset_cmd = app.add_subcommand("preset", "List or export bundled scenarios");
  preset_cmd->add_option("name", preset_name, "Preset to print");
  preset_cmd->add_option("--out", preset_out, "Write the preset JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[UsageError]: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*design_cmd) return cmd_design(design_opts, design_out, out);
    if (*sim_cmd) return cmd_simulate(sim_opts, sim_out, plot_script, out, err);
    if (*analyze_cmd) return cmd_analyze(trace_path, eps, t_check, analyze_out, out);
    if (*sweep_cmd) {
      return cmd_sweep(sweep_opts, sweep_out, sweep_param, sweep_values, jobs, out, err);
    }
    if (*preset_cmd) {
      if (preset_name.empty()) {
        for (const auto& n : preset_names()) out << n << "\n";
        return kExitOk;
      }
      const std::string text = preset_json(preset_name).dump(2) + "\n";
      if (preset_out.empty()) {
        out << text;
      } else {
        write_text(preset_out, text);
      }
      return kExitOk;
    }
  } catch (const Error& ex) {
    err << "error[" << ex.kind() << "]: " << ex.what() << "\n";
    return exit_code_for(ex);
  } catch (const fs::filesystem_error& ex) {
    err << "error[ConfigError]: " << ex.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}

}  // namespace esoform
