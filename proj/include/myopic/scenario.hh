#ifndef MYOPIC_SCENARIO_HH_
#define MYOPIC_SCENARIO_HH_

#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "myopic/absorption.hh"
#include "myopic/coefficient.hh"
#include "myopic/model.hh"
#include "myopic/regularize.hh"
#include "myopic/solver.hh"

namespace myopic {

/// Exit statuses of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitHypothesis = 3, kExitSolver = 4 };

/// Analytic profile from the small expression language of the config:
///   number                                  constant
///   {"abs_pow": [c, p]}                     |x - c|^p
///   {"cos": {"freq": f, "pi": b, "shift": s}}  cos(f (pi if b) (x - s))
///   {"sum": [e, ...]}, {"product": [e, ...]}
///   {"table": {"left": a, "right": b, "values": [...]}}  piecewise linear
/// Throws ConfigError naming `path` on malformed input.
Profile parse_expression(const nlohmann::json& j, const std::string& path);

enum class Mode { Single, EpsSweep, GridStudy };

struct Scenario {
  nlohmann::json resolved;  // the configuration with every default filled in
  std::string source;       // path the scenario was read from, empty for in-memory configs
  double left = 0.0;
  double right = 1.0;
  int n_cells = 64;
  CoefficientSpec coefficient = CoefficientSpec::constant(1.0);
  AbsorptionSpec absorption = AbsorptionSpec::linear();
  Profile u0;
  Profile w0;
  int j = 1;
  int j_max = 6;
  std::optional<double> eps_override;
  SolverParams solver;
  std::string out_dir = "out";
  Mode mode = Mode::Single;
  std::vector<int> sweep_j;
  std::vector<int> grid_n;
  std::vector<std::string> require;  // theorem1 .. theorem3
  HypothesisReport hypotheses;
  std::vector<std::string> warnings;

  GridPtr make_grid(int n) const;
};

/// Parses and validates a configuration document and runs the hypothesis
/// validation. Throws ConfigError for schema violations (with the field path)
/// and HypothesisError when a required theorem's hypotheses fail.
Scenario parse_scenario(const nlohmann::json& config, const std::string& source = "");
Scenario load_scenario(const std::string& path);

struct ExecuteOptions {
  std::optional<std::string> out_dir;
  int workers = 1;
  bool seed_check = false;  // rerun the first member in memory and compare series bytes
};

/// Runs the scenario's mode and writes manifest.json, series.csv, snapshots
/// and, for sweeps and grid studies, summary.csv. Returns an ExitCode.
int execute(const Scenario& s, const ExecuteOptions& opts, std::ostream& log);

/// Builds the family, writes family_epsilons.csv and family_fields.csv, and
/// enforces the ledger bounds. Returns an ExitCode.
int verify_family_command(const Scenario& s, const std::optional<std::string>& out_dir, std::ostream& log);

nlohmann::json to_json(const HypothesisReport& r);
nlohmann::json to_json(const PropertyLedger& l);
nlohmann::json to_json(const RegularizationFamily& f);

/// "%.17g" formatting used for every floating-point output.
std::string format_double(double v);

/// Rows of the time-series CSV, header first.
std::string series_header();
std::string series_row(const DiagnosticsRecord& r);

void write_family_bundle(const RegularizationFamily& f, const std::string& dir);

/// Creates `dir` and checks a file can be written inside it.
bool ensure_writable_dir(const std::string& dir, std::string& why);

}  // namespace myopic

#endif
