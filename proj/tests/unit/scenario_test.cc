#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "myopic/errors.hh"
#include "myopic/scenario.hh"

using namespace myopic;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_path(const std::string& name) { return std::string(MYOPIC_CONFIG_DIR) + "/" + name; }

std::string error_path(const json& cfg) {
  try {
    parse_scenario(cfg);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "myopic_unit" / name;
  fs::remove_all(p);
  return p;
}

json small_star() {
  return json::parse(R"({
    "domain": {"left": -1.0, "right": 1.0},
    "grid": {"n_cells": 40},
    "coefficient": {"kind": "power_law", "x0": 0.0, "theta": 0.5},
    "initial": {"u0": 1.0, "w0": {"abs_pow": [0.0, 1.0]}},
    "family": {"j": 2, "j_max": 3},
    "solver": {"t_end": 0.2, "sample_interval": 0.05},
    "outputs": {"snapshot_times": [0.1]}
  })");
}

}  // namespace

TEST(Expression, Operators) {
  EXPECT_DOUBLE_EQ(parse_expression(2.5, "e")(0.3), 2.5);
  EXPECT_DOUBLE_EQ(parse_expression(json::parse(R"({"abs_pow": [1.0, 2.0]})"), "e")(-1.0), 4.0);
  EXPECT_NEAR(parse_expression(json::parse(R"({"cos": {"freq": 1.0, "pi": true}})"), "e")(1.0), -1.0, 1e-15);
  EXPECT_NEAR(parse_expression(json::parse(R"({"cos": {"freq": 2.0, "shift": 0.5}})"), "e")(0.5), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(parse_expression(json::parse(R"({"sum": [1.0, 2.0, {"abs_pow": [0.0, 1.0]}]})"), "e")(-2.0), 5.0);
  EXPECT_DOUBLE_EQ(parse_expression(json::parse(R"({"product": [3.0, {"abs_pow": [0.0, 1.0]}]})"), "e")(2.0), 6.0);
  const Profile t = parse_expression(json::parse(R"({"table": {"left": 0, "right": 1, "values": [0, 2, 0]}})"), "e");
  EXPECT_DOUBLE_EQ(t(0.25), 1.0);
  EXPECT_DOUBLE_EQ(t(0.5), 2.0);
}

TEST(Expression, ErrorsNamePath) {
  try {
    parse_expression(json::parse(R"({"sum": [1.0, {"bogus": 1}]})"), "initial.u0");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(e.path().find("initial.u0"), std::string::npos);
  }
  EXPECT_THROW(parse_expression("x", "e"), ConfigError);
}

TEST(Scenario, MinimalConfigGetsDefaults) {
  const Scenario s = load_scenario(config_path("minimal.json"));
  EXPECT_EQ(s.mode, Mode::Single);
  EXPECT_GE(s.n_cells, SpatialGrid::kMinCells);
  EXPECT_TRUE(s.resolved.contains("solver"));
  EXPECT_TRUE(s.resolved["solver"].contains("dt_max"));
  EXPECT_TRUE(s.hypotheses.flags.theorem1);
}

TEST(Scenario, ReferenceScenarioHypotheses) {
  const Scenario s = load_scenario(config_path("s_star.json"));
  EXPECT_EQ(s.n_cells, 400);
  EXPECT_EQ(s.j, 4);
  EXPECT_EQ(s.j_max, 6);
  EXPECT_TRUE(s.hypotheses.flags.theorem1);
  EXPECT_TRUE(s.hypotheses.flags.theorem2);
  EXPECT_TRUE(s.hypotheses.flags.theorem3);
}

TEST(Scenario, HypothesisGate) {
  try {
    load_scenario(config_path("pathological.json"));
    FAIL();
  } catch (const HypothesisError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("theorem2"), std::string::npos);
    EXPECT_NE(what.find("(d2)"), std::string::npos);
  }
  json cfg = json::parse(slurp(config_path("pathological.json")));
  cfg.erase("require");
  EXPECT_NO_THROW(parse_scenario(cfg));
}

TEST(Scenario, SchemaViolationsNameTheField) {
  json cfg = small_star();
  cfg["coefficient"]["theta"] = "half";
  EXPECT_EQ(error_path(cfg), "coefficient.theta");
  cfg = small_star();
  cfg["solver"]["dt_maximum"] = 0.1;
  EXPECT_EQ(error_path(cfg), "solver.dt_maximum");
  cfg = small_star();
  cfg["grid"]["n_cells"] = 4;
  EXPECT_EQ(error_path(cfg), "grid.n_cells");
  cfg = small_star();
  cfg["family"]["j_max"] = 1;
  EXPECT_EQ(error_path(cfg), "family.j_max");
  cfg = small_star();
  cfg["mode"] = {{"kind", "eps_sweep"}, {"j_values", json::array()}};
  EXPECT_EQ(error_path(cfg), "mode.j_values");
  cfg = small_star();
  cfg["grid"]["n_cells"] = 41;  // center on the zero of d
  EXPECT_EQ(error_path(cfg), "grid.n_cells");
  cfg = small_star();
  cfg["unexpected"] = 1;
  EXPECT_EQ(error_path(cfg), "unexpected");
  EXPECT_EQ(error_path(small_star()), "<accepted>");
}

TEST(Execute, WritesOutputsAndIsReproducible) {
  const Scenario s = parse_scenario(small_star());
  std::ostringstream log;
  const fs::path a = scratch("exec_a"), b = scratch("exec_b");
  ASSERT_EQ(execute(s, {a.string(), 1, true}, log), kExitOk) << log.str();
  ASSERT_EQ(execute(s, {b.string(), 1, false}, log), kExitOk) << log.str();
  const std::string series = slurp(a / "series.csv");
  EXPECT_EQ(series, slurp(b / "series.csv"));
  EXPECT_EQ(series.substr(0, series.find('\n') + 1), series_header());
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_TRUE(manifest.contains("hypotheses"));
  EXPECT_TRUE(fs::exists(a / "snap_t0.100000.csv"));
  const std::string snap = slurp(a / "snap_t0.100000.csv");
  EXPECT_EQ(snap.substr(0, snap.find('\n')), "x,u,w,d_eps");
}

TEST(Execute, SweepSummaryRows) {
  json cfg = small_star();
  cfg["mode"] = {{"kind", "eps_sweep"}, {"j_values", {1, 2, 3}}};
  const Scenario s = parse_scenario(cfg);
  std::ostringstream log;
  const fs::path dir = scratch("sweep");
  ASSERT_EQ(execute(s, {dir.string(), 3, false}, log), kExitOk) << log.str();
  std::istringstream summary(slurp(dir / "summary.csv"));
  std::string line;
  std::getline(summary, line);
  std::vector<double> eps;
  while (std::getline(summary, line)) {
    const std::size_t a = line.find(',', line.find(',') + 1);
    eps.push_back(std::stod(line.substr(a + 1, line.find(',', a + 1) - a - 1)));
  }
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_GT(eps[0], eps[1]);
  EXPECT_GT(eps[1], eps[2]);
  const RegularizationFamily fam = RegularizationFamily::build(s.coefficient, s.w0, s.make_grid(s.n_cells), s.j_max);
  for (int j = 1; j <= 3; ++j) EXPECT_EQ(eps[static_cast<std::size_t>(j - 1)], fam.eps(j));
}

TEST(Execute, UnwritableDirectoryFailsBeforeComputing) {
  const fs::path base = scratch("blocked");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  std::ostringstream log;
  EXPECT_EQ(execute(parse_scenario(small_star()), {(base / "file" / "out").string(), 1, false}, log), kExitConfig);
}

TEST(Format, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_double(v)), v);
}
