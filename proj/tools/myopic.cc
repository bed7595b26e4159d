#include <CLI11.hpp>
#include <iostream>

#include "myopic/errors.hh"
#include "myopic/scenario.hh"

namespace {

int with_scenario(const std::string& path, const std::function<int(const myopic::Scenario&)>& body) {
  try {
    return body(myopic::load_scenario(path));
  } catch (const myopic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return myopic::kExitConfig;
  } catch (const myopic::HypothesisError& e) {
    std::cerr << "hypothesis gate: " << e.what() << "\n";
    return myopic::kExitHypothesis;
  } catch (const myopic::SolverError& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return myopic::kExitSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for the regularized degenerate haptotaxis system"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int workers = 1;
  bool seed_check = false;

  auto* sim = app.add_subcommand("simulate", "run a scenario and write manifest, series and snapshots");
  sim->add_option("--config", config, "scenario JSON")->required();
  sim->add_option("--out", out, "output directory (overrides outputs.directory)");
  sim->add_option("--workers", workers, "parallel runs for sweeps and grid studies")->check(CLI::PositiveNumber);
  sim->add_flag("--seed-check", seed_check, "rerun the first member and require a byte-identical series");

  auto* fam = app.add_subcommand("verify-family", "build the regularization family and check its ledger");
  fam->add_option("--config", config, "scenario JSON")->required();
  fam->add_option("--out", out, "directory for the family CSV bundle");

  auto* hyp = app.add_subcommand("hypotheses", "print the hypothesis report as JSON");
  hyp->add_option("--config", config, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : myopic::kExitConfig;
  }

  const std::optional<std::string> out_dir = out.empty() ? std::nullopt : std::optional<std::string>(out);
  if (sim->parsed())
    return with_scenario(config, [&](const myopic::Scenario& s) {
      return myopic::execute(s, {out_dir, workers, seed_check}, std::cerr);
    });
  if (fam->parsed())
    return with_scenario(config, [&](const myopic::Scenario& s) {
      return myopic::verify_family_command(s, out_dir, std::cout);
    });
  return with_scenario(config, [&](const myopic::Scenario& s) {
    std::cout << myopic::to_json(s.hypotheses).dump(2) << "\n";
    for (const std::string& w : s.warnings) std::cerr << "warning: " << w << "\n";
    return myopic::kExitOk;
  });
}
