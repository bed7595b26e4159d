#include "myopic/scenario.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "myopic/errors.hh"

namespace myopic {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      throw ConfigError(join(path, it.key()), "unknown field");
  }
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number_at(obj.at(key), join(path, key)) : fallback;
}

int integer_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

int integer_or(const json& obj, const char* key, const std::string& path, int fallback) {
  return obj.contains(key) ? integer_at(obj.at(key), join(path, key)) : fallback;
}

std::string string_or(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(join(path, key), "expected a string");
  return obj.at(key).get<std::string>();
}

const json& array_at(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "missing field");
  if (!obj.at(key).is_array()) throw ConfigError(join(path, key), "expected an array");
  return obj.at(key);
}

std::vector<double> numbers_at(const json& obj, const char* key, const std::string& path) {
  const json& a = array_at(obj, key, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number_at(a[i], index_path(join(path, key), i)));
  return out;
}

std::vector<int> integers_at(const json& obj, const char* key, const std::string& path) {
  const json& a = array_at(obj, key, path);
  std::vector<int> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(integer_at(a[i], index_path(join(path, key), i)));
  return out;
}

template <class F>
auto wrap_domain(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

Profile piecewise_linear(double left, double right, std::vector<double> values) {
  return [=, v = std::move(values)](double x) {
    const double s = std::clamp((x - left) / (right - left), 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(s), v.size() - 2);
    const double f = s - static_cast<double>(k);
    return (1.0 - f) * v[k] + f * v[k + 1];
  };
}

CoefficientSpec parse_coefficient(const json& j, const std::string& path, double left, double right, json& out) {
  require_object(j, path);
  const std::string kind = string_or(j, "kind", path, "");
  if (kind == "constant") {
    check_keys(j, path, {"kind", "value"});
    const double c = number_or(j, "value", path, 1.0);
    out = {{"kind", kind}, {"value", c}};
    return wrap_domain(join(path, "value"), [&] { return CoefficientSpec::constant(c); });
  }
  if (kind == "power_law") {
    check_keys(j, path, {"kind", "x0", "theta", "scale"});
    const double x0 = number_or(j, "x0", path, 0.0);
    const double theta = number_or(j, "theta", path, 0.5);
    const double scale = number_or(j, "scale", path, 1.0);
    out = {{"kind", kind}, {"x0", x0}, {"theta", theta}, {"scale", scale}};
    return wrap_domain(join(path, "theta"), [&] {
      return theta >= 1.0 ? CoefficientSpec::pathological_power_law(x0, theta, scale)
                          : CoefficientSpec::power_law(x0, theta, scale);
    });
  }
  if (kind == "product") {
    check_keys(j, path, {"kind", "factors", "scale"});
    const json& fs = array_at(j, "factors", path);
    std::vector<PowerLawFactor> factors;
    json fo = json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string fp = index_path(join(path, "factors"), i);
      check_keys(fs[i], fp, {"x0", "theta"});
      PowerLawFactor f{number_or(fs[i], "x0", fp, 0.0), number_or(fs[i], "theta", fp, 0.5)};
      factors.push_back(f);
      fo.push_back({{"x0", f.x0}, {"theta", f.theta}});
    }
    const double scale = number_or(j, "scale", path, 1.0);
    out = {{"kind", kind}, {"factors", fo}, {"scale", scale}};
    return wrap_domain(path, [&] { return CoefficientSpec::product(factors, scale); });
  }
  if (kind == "tabulated") {
    check_keys(j, path, {"kind", "samples"});
    std::vector<double> samples = numbers_at(j, "samples", path);
    out = {{"kind", kind}, {"samples", samples}};
    return wrap_domain(join(path, "samples"), [&] { return CoefficientSpec::tabulated(left, right, samples); });
  }
  throw ConfigError(join(path, "kind"), "expected one of constant, power_law, product, tabulated");
}

AbsorptionSpec parse_absorption(const json& j, const std::string& path, json& out) {
  require_object(j, path);
  const std::string kind = string_or(j, "kind", path, "linear");
  if (kind == "linear") {
    check_keys(j, path, {"kind"});
    out = {{"kind", kind}};
    return AbsorptionSpec::linear();
  }
  if (kind == "bounded_perturbation") {
    check_keys(j, path, {"kind", "c"});
    const double c = number_or(j, "c", path, 0.0);
    out = {{"kind", kind}, {"c", c}};
    return wrap_domain(join(path, "c"), [&] { return AbsorptionSpec::bounded_perturbation(c); });
  }
  throw ConfigError(join(path, "kind"), "expected linear or bounded_perturbation");
}

const char* hypothesis_label(const HypothesisFlags& f) {
  if (!f.d2) return "(d2) integrability of 1/d";
  if (!f.init) return "(init) admissible initial data";
  if (!f.w0_weight) return "(w0) finite weighted integral of w0";
  if (!f.absorption) return "(g) absorption derivative bounds";
  if (!f.log_integrable) return "integrability of (1/d) ln(1/d)";
  if (!f.w0_over_d) return "boundedness of w0/d";
  return "";
}

}  // namespace

Profile parse_expression(const json& j, const std::string& path) {
  if (j.is_number()) {
    const double c = number_at(j, path);
    return [c](double) { return c; };
  }
  if (!j.is_object() || j.size() != 1) throw ConfigError(path, "expected a number or a one-key expression object");
  const std::string op = j.begin().key();
  const json& arg = j.begin().value();
  const std::string p = join(path, op);
  if (op == "abs_pow") {
    if (!arg.is_array() || arg.size() != 2) throw ConfigError(p, "expected [center, power]");
    const double c = number_at(arg[0], index_path(p, 0));
    const double e = number_at(arg[1], index_path(p, 1));
    if (e < 0.0) throw ConfigError(index_path(p, 1), "power must be nonnegative");
    return [c, e](double x) { return std::pow(std::abs(x - c), e); };
  }
  if (op == "cos") {
    check_keys(arg, p, {"freq", "pi", "shift"});
    double f = number_or(arg, "freq", p, 1.0);
    if (arg.contains("pi")) {
      if (!arg.at("pi").is_boolean()) throw ConfigError(join(p, "pi"), "expected a boolean");
      if (arg.at("pi").get<bool>()) f *= std::numbers::pi;
    }
    const double s = number_or(arg, "shift", p, 0.0);
    return [f, s](double x) { return std::cos(f * (x - s)); };
  }
  if (op == "sum" || op == "product") {
    if (!arg.is_array() || arg.empty()) throw ConfigError(p, "expected a nonempty array");
    std::vector<Profile> terms;
    for (std::size_t i = 0; i < arg.size(); ++i) terms.push_back(parse_expression(arg[i], index_path(p, i)));
    if (op == "sum")
      return [terms](double x) {
        double s = 0.0;
        for (const Profile& t : terms) s += t(x);
        return s;
      };
    return [terms](double x) {
      double s = 1.0;
      for (const Profile& t : terms) s *= t(x);
      return s;
    };
  }
  if (op == "table") {
    check_keys(arg, p, {"left", "right", "values"});
    const double a = number_or(arg, "left", p, 0.0);
    const double b = number_or(arg, "right", p, 1.0);
    std::vector<double> v = numbers_at(arg, "values", p);
    if (!(b > a)) throw ConfigError(p, "need left < right");
    if (v.size() < 2) throw ConfigError(join(p, "values"), "need at least two values");
    return piecewise_linear(a, b, std::move(v));
  }
  throw ConfigError(p, "unknown expression; expected abs_pow, cos, sum, product or table");
}

GridPtr Scenario::make_grid(int n) const {
  const std::vector<double> zeros = coefficient.zeros_in(left, right);
  return std::make_shared<const SpatialGrid>(left, right, n, zeros);
}

Scenario parse_scenario(const json& config, const std::string& source) {
  check_keys(config, "",
             {"domain", "grid", "coefficient", "absorption", "initial", "family", "solver", "outputs", "mode",
              "require"});
  Scenario s;
  s.source = source;
  json& r = s.resolved;

  const json empty = json::object();
  const json& dom = config.contains("domain") ? config.at("domain") : empty;
  check_keys(dom, "domain", {"left", "right"});
  s.left = number_or(dom, "left", "domain", 0.0);
  s.right = number_or(dom, "right", "domain", 1.0);
  if (!(s.right > s.left)) throw ConfigError("domain", "need left < right");
  r["domain"] = {{"left", s.left}, {"right", s.right}};

  const json& gr = config.contains("grid") ? config.at("grid") : empty;
  check_keys(gr, "grid", {"n_cells"});
  s.n_cells = integer_or(gr, "n_cells", "grid", 64);
  if (s.n_cells < SpatialGrid::kMinCells)
    throw ConfigError("grid.n_cells", "need at least " + std::to_string(SpatialGrid::kMinCells) + " cells");
  r["grid"] = {{"n_cells", s.n_cells}};

  const json dflt_coef = {{"kind", "constant"}, {"value", 1.0}};
  s.coefficient = parse_coefficient(config.contains("coefficient") ? config.at("coefficient") : dflt_coef,
                                    "coefficient", s.left, s.right, r["coefficient"]);
  s.absorption = parse_absorption(config.contains("absorption") ? config.at("absorption") : empty, "absorption",
                                  r["absorption"]);

  const json& ini = config.contains("initial") ? config.at("initial") : empty;
  check_keys(ini, "initial", {"u0", "w0"});
  const json u0 = ini.contains("u0") ? ini.at("u0") : json(1.0);
  const json w0 = ini.contains("w0") ? ini.at("w0") : json(0.0);
  s.u0 = parse_expression(u0, "initial.u0");
  s.w0 = parse_expression(w0, "initial.w0");
  r["initial"] = {{"u0", u0}, {"w0", w0}};

  const json& fam = config.contains("family") ? config.at("family") : empty;
  check_keys(fam, "family", {"j", "j_max", "eps_override"});
  s.j = integer_or(fam, "j", "family", 1);
  s.j_max = integer_or(fam, "j_max", "family", std::max(6, s.j));
  if (s.j < 1) throw ConfigError("family.j", "must be >= 1");
  if (s.j_max < s.j) throw ConfigError("family.j_max", "must be >= family.j");
  r["family"] = {{"j", s.j}, {"j_max", s.j_max}, {"eps_override", nullptr}};
  if (fam.contains("eps_override") && !fam.at("eps_override").is_null()) {
    const double e = number_at(fam.at("eps_override"), "family.eps_override");
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("family.eps_override", "must lie in (0,1)");
    s.eps_override = e;
    r["family"]["eps_override"] = e;
  }

  const json& so = config.contains("solver") ? config.at("solver") : empty;
  check_keys(so, "solver",
             {"dt_max", "cfl_safety", "t_end", "sample_interval", "tol_newton", "w_diffusion", "steady_tol",
              "max_steps"});
  SolverParams& p = s.solver;
  p.dt_max = number_or(so, "dt_max", "solver", p.dt_max);
  p.cfl_safety = number_or(so, "cfl_safety", "solver", p.cfl_safety);
  p.t_end = number_or(so, "t_end", "solver", p.t_end);
  p.sample_interval = number_or(so, "sample_interval", "solver", p.sample_interval);
  p.tol_newton = number_or(so, "tol_newton", "solver", p.tol_newton);
  p.steady_tol = number_or(so, "steady_tol", "solver", p.steady_tol);
  if (so.contains("max_steps")) p.max_steps = integer_at(so.at("max_steps"), "solver.max_steps");
  const std::string wd = string_or(so, "w_diffusion", "solver", "implicit");
  if (wd == "implicit")
    p.w_diffusion = WDiffusion::LinearlyImplicit;
  else if (wd == "explicit")
    p.w_diffusion = WDiffusion::Explicit;
  else
    throw ConfigError("solver.w_diffusion", "expected implicit or explicit");

  const json& outp = config.contains("outputs") ? config.at("outputs") : empty;
  check_keys(outp, "outputs", {"directory", "snapshot_times", "equi_delta"});
  s.out_dir = string_or(outp, "directory", "outputs", "out");
  if (outp.contains("snapshot_times")) p.snapshot_times = numbers_at(outp, "snapshot_times", "outputs");
  p.equi_delta = number_or(outp, "equi_delta", "outputs", p.equi_delta);
  if (p.equi_delta > s.right - s.left) throw ConfigError("outputs.equi_delta", "must not exceed |Omega|");
  wrap_domain("solver", [&] {
    p.validate();
    return 0;
  });
  r["solver"] = {{"dt_max", p.dt_max},
                 {"cfl_safety", p.cfl_safety},
                 {"t_end", p.t_end},
                 {"sample_interval", p.sample_interval},
                 {"tol_newton", p.tol_newton},
                 {"w_diffusion", wd},
                 {"steady_tol", p.steady_tol},
                 {"max_steps", p.max_steps}};
  r["outputs"] = {{"directory", s.out_dir}, {"snapshot_times", p.snapshot_times}, {"equi_delta", p.equi_delta}};

  json mode = config.contains("mode") ? config.at("mode") : json("single");
  if (mode.is_string()) mode = {{"kind", mode}};
  check_keys(mode, "mode", {"kind", "j_values", "n_values"});
  const std::string kind = string_or(mode, "kind", "mode", "single");
  if (kind == "single") {
    s.mode = Mode::Single;
    r["mode"] = {{"kind", kind}};
  } else if (kind == "eps_sweep") {
    s.mode = Mode::EpsSweep;
    s.sweep_j = integers_at(mode, "j_values", "mode");
    if (s.sweep_j.empty()) throw ConfigError("mode.j_values", "must not be empty");
    for (std::size_t i = 0; i < s.sweep_j.size(); ++i)
      if (s.sweep_j[i] < 1 || s.sweep_j[i] > s.j_max)
        throw ConfigError(index_path("mode.j_values", i), "outside the built family 1..j_max");
    r["mode"] = {{"kind", kind}, {"j_values", s.sweep_j}};
  } else if (kind == "grid_study") {
    s.mode = Mode::GridStudy;
    s.grid_n = integers_at(mode, "n_values", "mode");
    if (s.grid_n.empty()) throw ConfigError("mode.n_values", "must not be empty");
    for (std::size_t i = 0; i < s.grid_n.size(); ++i)
      if (s.grid_n[i] < SpatialGrid::kMinCells) throw ConfigError(index_path("mode.n_values", i), "too few cells");
    r["mode"] = {{"kind", kind}, {"n_values", s.grid_n}};
  } else {
    throw ConfigError("mode.kind", "expected single, eps_sweep or grid_study");
  }

  if (config.contains("require")) {
    const json& req = config.at("require");
    if (!req.is_array()) throw ConfigError("require", "expected an array");
    for (std::size_t i = 0; i < req.size(); ++i) {
      if (!req[i].is_string()) throw ConfigError(index_path("require", i), "expected a string");
      const std::string t = req[i].get<std::string>();
      if (t != "theorem1" && t != "theorem2" && t != "theorem3")
        throw ConfigError(index_path("require", i), "expected theorem1, theorem2 or theorem3");
      s.require.push_back(t);
    }
  }
  r["require"] = s.require;

  GridPtr grid;
  try {
    grid = s.make_grid(s.n_cells);
  } catch (const DomainError& e) {
    throw ConfigError("grid.n_cells", e.what());
  }
  const InitialData init = wrap_domain("initial", [&] { return InitialData::make(grid, s.u0, s.w0); });
  s.hypotheses = validate_hypotheses(s.coefficient, init, *grid, s.absorption);

  const HypothesisFlags& f = s.hypotheses.flags;
  for (const std::string& t : s.require) {
    const bool ok = t == "theorem1" ? f.theorem1 : t == "theorem2" ? f.theorem2 : f.theorem3;
    if (!ok) {
      HypothesisFlags shown = f;
      if (t != "theorem3") shown.log_integrable = shown.w0_over_d = true;
      throw HypothesisError("scenario requires " + t + " but hypothesis " + hypothesis_label(shown) + " fails");
    }
  }
  if (!f.theorem1) s.warnings.push_back(std::string("hypothesis ") + hypothesis_label(f) + " fails");
  else if (!f.theorem3) s.warnings.push_back(std::string("theorem3 hypothesis ") + hypothesis_label(f) + " fails");
  for (const std::string& n : s.hypotheses.notes) s.warnings.push_back(n);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(config, path);
}

}  // namespace myopic
