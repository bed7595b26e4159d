#include "myopic/diagnostics.hh"

#include <algorithm>
#include <cmath>
#include <limits>

#include "myopic/errors.hh"
#include "myopic/model.hh"

namespace myopic {

std::vector<std::string> record_columns() {
  return {"t",  "mass_u", "mass_w", "w_inf",     "w_min",     "E1",        "E2",
          "E3", "E_total", "D1",    "D2",        "D3",        "mu",        "dev_L1",
          "ln_du_min", "ln_du_max", "cum_dissipation", "cum_wx_l2", "cum_dev_sq", "equi_worst"};
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,  r.mass_u,  r.mass_w, r.w_inf, r.w_min, r.E1,     r.E2,        r.E3,
          r.E_total, r.D1, r.D2,     r.D3,    r.mu,    r.dev_L1, r.ln_du_min, r.ln_du_max,
          r.cum_dissipation, r.cum_wx_l2, r.cum_dev_sq, r.equi_worst};
}

void Accumulators::advance(const InstantRates& before, const InstantRates& after, double dt) {
  cum_dissipation += 0.5 * dt * (before.dissipation + after.dissipation);
  cum_wx_l2 += 0.5 * dt * (before.wx_l2 + after.wx_l2);
  cum_dev_sq += 0.5 * dt * (before.dev_sq + after.dev_sq);
  cum_uw += 0.5 * dt * (before.uw + after.uw);
}

std::vector<double> centered_wx(const ScalarField& w) {
  const int n = w.size();
  const double h = w.grid().h();
  std::vector<double> wx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double right = i + 1 < n ? (w[i + 1] - w[i]) / h : 0.0;
    const double left = i > 0 ? (w[i] - w[i - 1]) / h : 0.0;
    wx[static_cast<std::size_t>(i)] = 0.5 * (left + right);
  }
  return wx;
}

std::vector<double> w_flux_divergence(const ScalarField& w, const ScalarField& d_eps, const AbsorptionSpec& g) {
  const int n = w.size();
  const double h = w.grid().h();
  std::vector<double> flux(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double wf = 0.5 * (w[i] + w[i + 1]);
    const double df = 0.5 * (d_eps[i] + d_eps[i + 1]);
    flux[static_cast<std::size_t>(i) + 1] = df / std::sqrt(g.g(wf)) * (w[i + 1] - w[i]) / h;
  }
  std::vector<double> div(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    div[static_cast<std::size_t>(i)] = (flux[static_cast<std::size_t>(i) + 1] - flux[static_cast<std::size_t>(i)]) / h;
  return div;
}

namespace {

struct Parts {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, wx_l2 = 0.0, mu = 0.0, dev = 0.0, uw = 0.0;
};

Parts parts(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g) {
  const int n = s.u.size();
  const double h = s.u.grid().h();
  const double len = s.u.grid().length();
  const ScalarField& d = slice.d_eps;
  const std::vector<double> wx = centered_wx(s.w);
  Parts p;
  for (int i = 0; i + 1 < n; ++i) {
    const double v0 = d[i] * s.u[i];
    const double v1 = d[i + 1] * s.u[i + 1];
    const double mean = 0.5 * (v0 + v1);
    const double grad = (v1 - v0) / h;
    if (mean > 0.0) p.d1 += grad * grad / mean * h;
  }
  const double coef2 = g.lower() / (4.0 * g.upper());
  for (int i = 0; i < n; ++i) {
    const double x = wx[static_cast<std::size_t>(i)];
    p.d2 += coef2 * d[i] * s.u[i] * x * x / s.w[i] * h;
    p.wx_l2 += x * x * h;
    p.mu += d[i] * s.u[i] * h;
    p.uw += s.u[i] * s.w[i] * h;
  }
  p.mu /= len;
  for (int i = 0; i < n; ++i) p.dev += std::abs(d[i] * s.u[i] - p.mu) * h;
  const std::vector<double> div = w_flux_divergence(s.w, d, g);
  for (int i = 0; i < n; ++i) {
    const double q = div[static_cast<std::size_t>(i)];
    p.d3 += 0.5 * s.eps / std::sqrt(g.g(s.w[i])) * q * q * h;
  }
  return p;
}

}  // namespace

InstantRates rates(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g) {
  const Parts p = parts(s, slice, g);
  return InstantRates{p.d1 + p.d2 + p.d3, p.wx_l2, p.dev * p.dev, p.uw};
}

DiagnosticsRecord record(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g,
                         const Accumulators& acc, double equi_delta) {
  const int n = s.u.size();
  const double h = s.u.grid().h();
  const ScalarField& d = slice.d_eps;
  const ScalarField& dx = slice.d_eps_x;
  const std::vector<double> wx = centered_wx(s.w);
  const Parts p = parts(s, slice, g);

  DiagnosticsRecord r;
  r.t = s.t;
  r.mass_u = s.u.integral();
  r.mass_w = s.w.integral();
  r.w_inf = s.w.max();
  r.w_min = s.w.min();
  const double coef3 = g.upper() / (g.lower() * g.lower());
  r.ln_du_min = std::numeric_limits<double>::infinity();
  r.ln_du_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = d[i] * s.u[i];
    const double lv = std::log(v);
    if (s.u[i] > 0.0) r.E1 += s.u[i] * lv * h;
    const double x = wx[static_cast<std::size_t>(i)];
    r.E2 += 0.5 * d[i] * x * x / g.g(s.w[i]) * h;
    r.E3 += coef3 * dx[i] * dx[i] / d[i] * s.w[i] * h;
    r.ln_du_min = std::min(r.ln_du_min, lv);
    r.ln_du_max = std::max(r.ln_du_max, lv);
  }
  r.E_total = r.E1 + r.E2 + r.E3;
  r.D1 = p.d1;
  r.D2 = p.d2;
  r.D3 = p.d3;
  r.mu = p.mu;
  r.dev_L1 = p.dev;
  r.cum_dissipation = acc.cum_dissipation;
  r.cum_wx_l2 = acc.cum_wx_l2;
  r.cum_dev_sq = acc.cum_dev_sq;
  r.equi_worst = equi_integrability(s, equi_delta);
  return r;
}

double equi_integrability(const SimState& s, double delta) {
  const SpatialGrid& grid = s.u.grid();
  if (!(delta > 0.0 && delta <= grid.length() * (1.0 + 1e-12)))
    throw DomainError("equi_integrability: delta must lie in (0, |Omega|]");
  std::vector<double> cells(s.u.values().begin(), s.u.values().end());
  for (double& c : cells) c *= grid.h();
  return greedy_sup(std::move(cells), grid.h(), delta);
}

double energy_source(const AbsorptionSpec& g, double m_bound, double eps) {
  const double og = g.upper();
  const double ug = g.lower();
  return std::sqrt(std::pow(og, 5) * m_bound * eps) / (2.0 * std::pow(ug, 4));
}

EnergyCheck energy_slope_check(const std::vector<DiagnosticsRecord>& records, const AbsorptionSpec& g,
                               double m_bound, double eps, double tol_energy) {
  if (records.size() < 2) throw DomainError("energy_slope_check: at least two samples required");
  const double slope = energy_source(g, m_bound, eps);
  EnergyCheck out;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const double allowed = slope * (records[k + 1].t - records[k].t);
    const double excess = records[k + 1].E_total - records[k].E_total - allowed;
    out.worst_excess = std::max(out.worst_excess, excess);
    if (excess > tol_energy) ++out.violations;
  }
  return out;
}

StabilizationReport stabilization_report(const std::vector<DiagnosticsRecord>& records, double mu_inf,
                                         double length) {
  if (records.empty()) throw DomainError("stabilization_report: empty trajectory");
  const DiagnosticsRecord& last = records.back();
  StabilizationReport r;
  r.dev_rel = last.dev_L1 / (mu_inf * length);
  r.mu_rel = std::abs(last.mu - mu_inf) / mu_inf;
  r.w_inf = last.w_inf;
  const double t0 = 0.9 * last.t;
  auto it = std::find_if(records.begin(), records.end(), [&](const DiagnosticsRecord& x) { return x.t >= t0; });
  const double before = it->cum_dev_sq;
  r.dev_sq_last_decade_growth = before > 0.0 ? (last.cum_dev_sq - before) / before : 0.0;
  r.dev_sq_saturated = r.dev_sq_last_decade_growth < 0.05;
  return r;
}

BlowupReport blowup_report(const std::vector<DiagnosticsRecord>& records, double tau) {
  if (records.empty() || tau >= records.back().t)
    throw DomainError("blowup_report: tau must be smaller than the final sample time");
  BlowupReport r;
  r.max_ln_du = -std::numeric_limits<double>::infinity();
  r.max_neg_ln_du = -std::numeric_limits<double>::infinity();
  const DiagnosticsRecord* prev = nullptr;
  auto cube = [](const DiagnosticsRecord& x) {
    const double m = std::max(std::abs(x.ln_du_min), std::abs(x.ln_du_max));
    return m * m * m;
  };
  for (const DiagnosticsRecord& x : records) {
    if (x.t < tau) continue;
    r.max_ln_du = std::max(r.max_ln_du, x.ln_du_max);
    r.max_neg_ln_du = std::max(r.max_neg_ln_du, -x.ln_du_min);
    if (prev) r.ln_cubed_integral += 0.5 * (x.t - prev->t) * (cube(x) + cube(*prev));
    prev = &x;
  }
  r.c1 = std::exp(r.max_neg_ln_du);
  r.c2 = std::exp(r.max_ln_du);
  return r;
}

}  // namespace myopic
