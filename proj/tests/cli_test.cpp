#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "esoform/cli.hpp"
#include "esoform/scenario.hpp"

using namespace esoform;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "esoform");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(ESOFORM_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const json& j) {
  const auto p = dir / "scenario.json";
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, DesignPresetSucceeds) {
  const auto dir = scratch("design_preset");
  const auto r = cli({"design", "--preset", "reference", "--out", (dir / "d.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.9801"), std::string::npos) << r.out;
  EXPECT_TRUE(read_json(dir / "d.json")["feasibility"]["feasible"].get<bool>());
}

TEST(Cli, DesignOverrideFlag) {
  const auto r = cli({"design", "--preset", "reference", "--lambda2-override", "0.9293"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.0654"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("1.8576"), std::string::npos) << r.out;
}

TEST(Cli, DisconnectedTopologyExitsFour) {
  const auto dir = scratch("disconnected");
  auto j = preset_json("reference");
  json w = json::array();
  for (int i = 0; i < 6; ++i) {
    json row = json::array();
    for (int k = 0; k < 6; ++k) row.push_back((i ^ 1) == k ? 1.0 : 0.0);
    w.push_back(row);
  }
  j["topology"] = {{"n_agents", 6}, {"weights", w}};
  const auto r = cli({"design", "--config", write_config(dir, j)});
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_NE(r.err.find("NoSpanningTree"), std::string::npos) << r.err;
}

TEST(Cli, InfeasibleFormationExitsThree) {
  const auto dir = scratch("infeasible");
  auto j = preset_json("reference");
  const auto cfg = parse_scenario(j);
  auto f = formation_to_json(cfg.formation);
  for (auto& a : f["agents"]) {
    for (auto& v : a["velocity"]) v = json::array();
  }
  j["formation"] = f;
  const auto r = cli({"design", "--config", write_config(dir, j)});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("Infeasible"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch("config_error");
  auto j = preset_json("reference");
  j["integrator"]["dt"] = 0.0;
  const auto r = cli({"design", "--config", write_config(dir, j)});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("integrator.dt"), std::string::npos) << r.err;

  EXPECT_EQ(cli({"design", "--config", (dir / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"design", "--preset", "nope"}).code, 2);
  EXPECT_EQ(cli({"design", "--bogus-flag"}).code, 2);
}

TEST(Cli, ReferenceSimulationMeetsErrorBound) {
  const auto dir = scratch("sim_reference");
  const auto r = cli({"simulate", "--preset", "reference", "--out", dir.string(), "--plot-script"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(dir / "summary.json");
  EXPECT_EQ(s["max_error_last_quarter"]["t_start"].get<double>(), 15.0);
  EXPECT_LT(s["max_error_last_quarter"]["value"].get<double>(), 0.1);
  for (const char* f : {"trace.csv", "center.csv", "design.json", "plot_trace.py"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".partial");

  const auto a = cli({"analyze", "--trace", (dir / "trace.csv").string(), "--out",
                      (dir / "analysis").string()});
  EXPECT_EQ(a.code, 0) << a.err;
  const auto rep = read_json(dir / "analysis" / "analysis.json");
  EXPECT_TRUE(rep["passed"].get<bool>());
  EXPECT_LT(rep["max_residual"].get<double>(), 1e-2);
}

TEST(Cli, EveryPresetRoundTrips) {
  for (const auto& name : preset_names()) {
    const auto dir = scratch("roundtrip_" + name);
    ASSERT_EQ(cli({"preset", name, "--out", (dir / "cfg.json").string()}).code, 0);
    const auto cfg = (dir / "cfg.json").string();
    EXPECT_EQ(cli({"design", "--config", cfg}).code, 0) << name;
    const auto sim = cli({"simulate", "--config", cfg, "--horizon", "5", "--out", (dir / "run").string()});
    ASSERT_EQ(sim.code, 0) << name << sim.err;
    const auto an = cli({"analyze", "--trace", (dir / "run" / "trace.csv").string()});
    EXPECT_EQ(an.code, 0) << name << an.out;
  }
}

TEST(Cli, SimulationOutputIsDeterministic) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  ASSERT_EQ(cli({"simulate", "--preset", "reference", "--horizon", "3", "--out", a.string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--preset", "reference", "--horizon", "3", "--out", b.string()}).code, 0);
  for (const char* f : {"trace.csv", "center.csv", "design.json", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, UndisturbedPresetSettles) {
  const auto dir = scratch("undisturbed");
  ASSERT_EQ(cli({"simulate", "--preset", "undisturbed", "--out", dir.string()}).code, 0);
  EXPECT_LT(read_json(dir / "summary.json")["final_error"].get<double>(), 1e-3);
}

TEST(Cli, CompensationOffKeepsCenterLawButWorsensError) {
  const auto on = scratch("comp_on");
  const auto off = scratch("comp_off");
  ASSERT_EQ(cli({"simulate", "--preset", "reference", "--out", on.string()}).code, 0);
  ASSERT_EQ(cli({"simulate", "--preset", "uncompensated", "--out", off.string()}).code, 0);
  const auto a = cli({"analyze", "--trace", (off / "trace.csv").string()});
  EXPECT_EQ(a.code, 0) << a.out;
  const double e_on = read_json(on / "summary.json")["max_error_last_quarter"]["value"];
  const double e_off = read_json(off / "summary.json")["max_error_last_quarter"]["value"];
  EXPECT_GT(e_off, 2.0 * e_on);
  EXPECT_LT(read_json(off / "summary.json")["center_max_residual"].get<double>(), 1e-2);
}

TEST(Cli, TruncatedTraceExitsTwo) {
  const auto dir = scratch("truncated");
  ASSERT_EQ(cli({"simulate", "--preset", "reference", "--horizon", "2", "--out", dir.string()}).code, 0);
  const std::string text = slurp(dir / "trace.csv");
  std::ofstream(dir / "cut.csv") << text.substr(0, text.size() / 2);
  const auto r = cli({"analyze", "--trace", (dir / "cut.csv").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("FormatError"), std::string::npos) << r.err;
}

TEST(Cli, DivergentRunLeavesNoOutputs) {
  const auto dir = scratch("divergent");
  const auto r = cli({"simulate", "--preset", "reference", "--dt", "0.5", "--horizon", "200",
                      "--out", dir.string()});
  EXPECT_EQ(r.code, 5) << r.err;
  EXPECT_NE(r.err.find("NonFiniteState"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Cli, SweepWritesOneRowPerValue) {
  const auto dir = scratch("sweep");
  const auto r = cli({"sweep", "--preset", "reference", "--horizon", "4", "--param", "sigma",
                      "--values", "5,10,20", "--jobs", "3", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(dir / "sweep.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_TRUE(fs::exists(dir / "sigma_10" / "trace.csv"));
}

TEST(Cli, PresetListing) {
  const auto r = cli({"preset"});
  EXPECT_EQ(r.code, 0);
  for (const auto& n : preset_names()) EXPECT_NE(r.out.find(n), std::string::npos);
}
