#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "myopic/errors.hh"
#include "myopic/oracle.hh"
#include "myopic/scenario.hh"

namespace myopic {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string series_header() {
  std::string out;
  for (const std::string& c : record_columns()) out += (out.empty() ? "" : ",") + c;
  return out + "\n";
}

std::string series_row(const DiagnosticsRecord& r) {
  std::string out;
  bool first = true;
  for (double v : record_values(r)) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  return out + "\n";
}

bool ensure_writable_dir(const std::string& dir, std::string& why) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    why = ec.message();
    return false;
  }
  const fs::path probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) {
      why = "cannot create files";
      return false;
    }
  }
  fs::remove(probe, ec);
  return true;
}

namespace {

json estimate_json(const IntegralEstimate& e) {
  return {{"value", e.value},
          {"analytic", e.analytic},
          {"resolved", e.resolved},
          {"refinement_change", e.refinement_change},
          {"cells", e.cells}};
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

struct Member {
  int n = 0;
  int j = 0;
  std::string subdir;  // empty for single runs
};

struct MemberResult {
  Member m;
  double eps = 0.0;
  bool ok = false;
  std::string error;
  long steps = 0;
  bool stopped_steady = false;
  DiagnosticsRecord last;
  double max_ln_du = 0.0;
  EnergyCheck energy;
  double source_slope = 0.0;
  double wall = 0.0;
};

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_t%.6f.csv", t);
  return buf;
}

std::string snapshot_csv(const Snapshot& s, const ScalarField& d_eps) {
  std::string out = "x,u,w,d_eps\n";
  const SpatialGrid& g = s.u.grid();
  for (int i = 0; i < g.size(); ++i)
    out += format_double(g.center(i)) + "," + format_double(s.u[i]) + "," + format_double(s.w[i]) + "," +
           format_double(d_eps[i]) + "\n";
  return out;
}

FamilySlice member_slice(const Scenario& sc, const RegularizationFamily& fam, int j) {
  if (sc.mode == Mode::Single && sc.eps_override) return fam.slice_for_eps(*sc.eps_override);
  return fam.slice(j);
}

RunSetup member_setup(const Scenario& sc, const RegularizationFamily& fam, int j) {
  RunSetup rs;
  rs.slice = member_slice(sc, fam, j);
  rs.g = sc.absorption;
  rs.u0 = ScalarField::sample(fam.grid_ptr(), sc.u0);
  rs.params = sc.solver;
  rs.m_bound = ScalarField::sample(fam.grid_ptr(), sc.w0).max() + 1.0;
  return rs;
}

MemberResult run_member(const Scenario& sc, const RegularizationFamily& fam, const Member& m, const fs::path& dir) {
  MemberResult res;
  res.m = m;
  const auto start = std::chrono::steady_clock::now();
  try {
    RunSetup rs = member_setup(sc, fam, m.j);
    res.eps = rs.slice.eps;
    fs::create_directories(dir);
    std::ofstream series(dir / "series.csv", std::ios::binary);
    if (!series) throw std::runtime_error("cannot write " + (dir / "series.csv").string());
    series << series_header();
    rs.on_record = [&](const DiagnosticsRecord& r) {
      series << series_row(r);
      series.flush();
    };
    const ScalarField d_eps = rs.slice.d_eps;
    rs.on_snapshot = [&](const Snapshot& s) { write_file(dir / snapshot_name(s.t), snapshot_csv(s, d_eps)); };
    const Trajectory tr = run(rs);
    res.steps = tr.final_state.step_count;
    res.stopped_steady = tr.stopped_steady;
    res.last = tr.records.back();
    res.max_ln_du = -INFINITY;
    for (const DiagnosticsRecord& r : tr.records) res.max_ln_du = std::max(res.max_ln_du, r.ln_du_max);
    res.source_slope = energy_source(sc.absorption, tr.m_bound, res.eps);
    if (tr.records.size() >= 2)
      res.energy = energy_slope_check(tr.records, sc.absorption, tr.m_bound, res.eps,
                                      1e-6 * std::abs(tr.records.front().E_total));
    res.ok = true;
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  res.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

template <class F>
void parallel_for(int count, int workers, F&& f) {
  if (workers <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) f(k);
    });
  for (std::thread& t : pool) t.join();
}

std::string summary_csv(const std::vector<MemberResult>& results) {
  std::string out = "j,n_cells,eps,final_dev_L1,final_w_inf,max_ln_du,energy_violations,wall_time_s\n";
  for (const MemberResult& r : results) {
    if (!r.ok) continue;
    out += std::to_string(r.m.j) + "," + std::to_string(r.m.n) + "," + format_double(r.eps) + "," +
           format_double(r.last.dev_L1) + "," + format_double(r.last.w_inf) + "," + format_double(r.max_ln_du) + "," +
           std::to_string(r.energy.violations) + "," + format_double(r.wall) + "\n";
  }
  return out;
}

}  // namespace

json to_json(const HypothesisReport& r) {
  const HypothesisFlags& f = r.flags;
  return {{"integral_inv_d", estimate_json(r.integral_inv_d)},
          {"integral_inv_d_log", estimate_json(r.integral_inv_d_log)},
          {"integral_w0_weight", estimate_json(r.integral_w0_weight)},
          {"w0_over_d_sup", estimate_json(r.w0_over_d_sup)},
          {"w0_vanishes_at_zeros", r.w0_vanishes_at_zeros},
          {"sqrt_w0_h1", r.sqrt_w0_h1},
          {"zeros", r.zeros},
          {"flags",
           {{"d2", f.d2},
            {"init", f.init},
            {"w0_weight", f.w0_weight},
            {"log_integrable", f.log_integrable},
            {"w0_over_d", f.w0_over_d},
            {"absorption", f.absorption},
            {"theorem1", f.theorem1},
            {"theorem2", f.theorem2},
            {"theorem3", f.theorem3}}},
          {"notes", r.notes}};
}

json to_json(const PropertyLedger& l) {
  json rows = json::array();
  for (const LedgerRow& r : l.rows)
    rows.push_back({{"j", r.j},
                    {"eps", r.eps},
                    {"grad_sq_cubed", r.grad_sq_cubed},
                    {"grad_quartic", r.grad_quartic},
                    {"floor_ratio", r.floor_ratio},
                    {"log_slope", r.log_slope},
                    {"w0_gradient_energy", r.w0_gradient_energy},
                    {"w0_weighted_mass", r.w0_weighted_mass},
                    {"sup_dist", r.sup_distance}});
  return {{"rows", rows},
          {"max_w0_gradient_energy", l.max_w0_gradient_energy},
          {"max_w0_weighted_mass", l.max_w0_weighted_mass},
          {"monotone", l.monotone},
          {"sandwich", l.sandwich},
          {"worst_monotone_excess", l.worst_monotone_excess}};
}

json to_json(const RegularizationFamily& f) {
  json members = json::array();
  for (int j = 1; j <= f.j_max(); ++j) {
    const DEpsMember& m = f.d_eps(j);
    json ramps = json::array();
    for (const RampInterval& r : f.w0j(j).intervals)
      ramps.push_back({{"index", r.index}, {"a", r.a}, {"b", r.b}, {"delta", r.delta}, {"included", r.included}});
    members.push_back({{"j", j},
                       {"delta_squeeze", m.delta},
                       {"eta_mollifier", m.eta},
                       {"squeeze_error", m.squeeze_error},
                       {"mollify_error", m.mollify_error},
                       {"endpoint_dx", {m.endpoint_dx_left, m.endpoint_dx_right}},
                       {"ramps", ramps}});
  }
  json terms = json::array();
  for (const EpsilonTerms& t : f.selection().terms)
    terms.push_back({{"j", t.j},
                     {"halving", t.halving},
                     {"power", t.power},
                     {"inv_d3", t.inv_d3},
                     {"inv_d4", t.inv_d4},
                     {"ratio_sup", t.ratio_sup},
                     {"eps1", t.eps1},
                     {"eps2", t.eps2},
                     {"reciprocal_j", t.reciprocal_j},
                     {"value", t.value}});
  return {{"n_cells", f.grid().size()},
          {"epsilons", f.epsilons()},
          {"c1", f.selection().c1},
          {"c2", f.selection().c2},
          {"epsilon_terms", terms},
          {"members", members},
          {"ledger", to_json(f.ledger())}};
}

void write_family_bundle(const RegularizationFamily& f, const std::string& dir) {
  std::string eps =
      "j,eps,delta_squeeze,eta_mollifier,grad_sq_cubed,grad_quartic,floor_ratio,log_slope,w0_gradient_energy,w0_weighted_mass,"
      "sup_dist\n";
  for (const LedgerRow& r : f.ledger().rows) {
    const DEpsMember& m = f.d_eps(r.j);
    eps += std::to_string(r.j) + "," + format_double(r.eps) + "," + format_double(m.delta) + "," +
           format_double(m.eta) + "," + format_double(r.grad_sq_cubed) + "," + format_double(r.grad_quartic) + "," +
           format_double(r.floor_ratio) + "," + format_double(r.log_slope) + "," +
           format_double(r.w0_gradient_energy) + "," + format_double(r.w0_weighted_mass) + "," +
           format_double(r.sup_distance) + "\n";
  }
  std::string fields = "j,x,d_eps,d_eps_x,w0j,w0eps\n";
  for (int j = 1; j <= f.j_max(); ++j) {
    const ScalarField w0eps = f.w0eps(j);
    const DEpsMember& m = f.d_eps(j);
    for (int i = 0; i < f.grid().size(); ++i)
      fields += std::to_string(j) + "," + format_double(f.grid().center(i)) + "," + format_double(m.field[i]) + "," +
                format_double(m.derivative[i]) + "," + format_double(f.w0j(j).field[i]) + "," +
                format_double(w0eps[i]) + "\n";
  }
  write_file(fs::path(dir) / "family_epsilons.csv", eps);
  write_file(fs::path(dir) / "family_fields.csv", fields);
}

int execute(const Scenario& sc, const ExecuteOptions& opts, std::ostream& log) {
  const std::string dir = opts.out_dir.value_or(sc.out_dir);
  std::string why;
  if (!ensure_writable_dir(dir, why)) {
    log << "error: output directory " << dir << " is not writable: " << why << "\n";
    return kExitConfig;
  }
  for (const std::string& w : sc.warnings) log << "warning: " << w << "\n";

  std::vector<Member> members;
  switch (sc.mode) {
    case Mode::Single:
      members.push_back({sc.n_cells, sc.j, ""});
      break;
    case Mode::EpsSweep:
      for (int j : sc.sweep_j) members.push_back({sc.n_cells, j, "j" + std::to_string(j)});
      break;
    case Mode::GridStudy:
      for (int n : sc.grid_n) members.push_back({n, sc.j, "n" + std::to_string(n)});
      break;
  }

  // One family per distinct grid, built before any run.
  std::map<int, std::shared_ptr<const RegularizationFamily>> families;
  try {
    for (const Member& m : members) {
      if (families.count(m.n)) continue;
      GridPtr grid = sc.make_grid(m.n);
      families[m.n] = std::make_shared<const RegularizationFamily>(
          RegularizationFamily::build(sc.coefficient, sc.w0, grid, sc.j_max, opts.workers));
    }
  } catch (const DomainError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RegularizationError& e) {
    log << "error: " << e.what() << "\n";
    return kExitSolver;
  }

  std::vector<MemberResult> results(members.size());
  parallel_for(static_cast<int>(members.size()), opts.workers, [&](int k) {
    const Member& m = members[static_cast<std::size_t>(k)];
    results[static_cast<std::size_t>(k)] = run_member(sc, *families.at(m.n), m, fs::path(dir) / m.subdir);
  });

  json manifest;
  manifest["source"] = sc.source;
  manifest["config"] = sc.resolved;
  manifest["hypotheses"] = to_json(sc.hypotheses);
  manifest["warnings"] = sc.warnings;
  manifest["mu_infinity"] = nullptr;
  if (sc.hypotheses.flags.d2) {
    GridPtr grid = sc.make_grid(sc.n_cells);
    manifest["mu_infinity"] = mu_infinity(ScalarField::sample(grid, sc.u0), sc.coefficient, *grid);
  }
  json fams = json::array();
  for (const auto& [n, f] : families) fams.push_back(to_json(*f));
  manifest["families"] = fams;
  json runs = json::array();
  int status = kExitOk;
  for (const MemberResult& r : results) {
    json jr = {{"j", r.m.j}, {"n_cells", r.m.n}, {"eps", r.eps}, {"directory", r.m.subdir}, {"ok", r.ok}};
    if (r.ok) {
      jr["steps"] = r.steps;
      jr["stopped_steady"] = r.stopped_steady;
      jr["final_t"] = r.last.t;
      jr["final_mass_u"] = r.last.mass_u;
      jr["final_mu"] = r.last.mu;
      jr["final_dev_L1"] = r.last.dev_L1;
      jr["final_w_inf"] = r.last.w_inf;
      jr["max_ln_du"] = r.max_ln_du;
      jr["energy_source_slope"] = r.source_slope;
      jr["energy_violations"] = r.energy.violations;
      jr["energy_worst_excess"] = r.energy.worst_excess;
    } else {
      jr["error"] = r.error;
      log << "error: run j=" << r.m.j << " n=" << r.m.n << ": " << r.error << "\n";
      status = kExitSolver;
    }
    runs.push_back(jr);
  }
  manifest["runs"] = runs;
  write_file(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  if (sc.mode != Mode::Single) write_file(fs::path(dir) / "summary.csv", summary_csv(results));

  if (opts.seed_check && status == kExitOk) {
    const Member& m = members.front();
    RunSetup rs = member_setup(sc, *families.at(m.n), m.j);
    std::string replay = series_header();
    rs.on_record = [&](const DiagnosticsRecord& r) { replay += series_row(r); };
    rs.on_snapshot = [](const Snapshot&) {};
    run(rs);
    std::ifstream in(fs::path(dir) / m.subdir / "series.csv", std::ios::binary);
    std::stringstream first;
    first << in.rdbuf();
    if (first.str() != replay) {
      log << "error: seed check failed, repeated run produced a different series.csv\n";
      return kExitSolver;
    }
    log << "seed check: repeated run is byte-identical\n";
  }
  for (const MemberResult& r : results)
    if (r.ok)
      log << "run j=" << r.m.j << " n=" << r.m.n << " eps=" << format_double(r.eps) << " steps=" << r.steps
          << " final dev_L1=" << format_double(r.last.dev_L1) << " w_inf=" << format_double(r.last.w_inf)
          << " energy violations=" << r.energy.violations << "\n";
  return status;
}

int verify_family_command(const Scenario& sc, const std::optional<std::string>& out_dir, std::ostream& log) {
  const std::string dir = out_dir.value_or(sc.out_dir);
  std::string why;
  if (!ensure_writable_dir(dir, why)) {
    log << "error: output directory " << dir << " is not writable: " << why << "\n";
    return kExitConfig;
  }
  try {
    const RegularizationFamily fam =
        RegularizationFamily::build(sc.coefficient, sc.w0, sc.make_grid(sc.n_cells), sc.j_max);
    write_family_bundle(fam, dir);
    log << "j eps grad_sq_cubed grad_quartic floor_ratio log_slope w0_gradient_energy w0_weighted_mass sup_dist\n";
    for (const LedgerRow& r : fam.ledger().rows)
      log << r.j << " " << format_double(r.eps) << " " << r.grad_sq_cubed << " " << r.grad_quartic << " "
          << r.floor_ratio << " " << r.log_slope << " " << r.w0_gradient_energy << " " << r.w0_weighted_mass << " "
          << r.sup_distance << "\n";
    verify_family(fam);
    log << "ledger ok: max w0_gradient_energy = " << fam.ledger().max_w0_gradient_energy
        << ", max w0_weighted_mass = " << fam.ledger().max_w0_weighted_mass << ", monotone, sandwich\n";
  } catch (const RegularizationError& e) {
    log << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace myopic
