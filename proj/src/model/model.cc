#include "myopic/model.hh"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "myopic/errors.hh"

namespace myopic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool midpoint_hits_zero(double a, double b, int n, const std::vector<double>& zeros) {
  const double h = (b - a) / n;
  for (double z : zeros) {
    const double s = (z - a) / h - 0.5;
    const double k = std::round(s);
    if (k >= 0 && k < n && std::abs(z - (a + (k + 0.5) * h)) <= 1e-12 * (b - a)) return true;
  }
  return false;
}

int safe_cell_count(double a, double b, int n, const std::vector<double>& zeros) {
  while (midpoint_hits_zero(a, b, n, zeros) || midpoint_hits_zero(a, b, 2 * n, zeros)) ++n;
  return n;
}

double midpoint_sum(const Profile& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = f(a + (k + 0.5) * h);
    if (!std::isfinite(v)) return kInf;
    s += v;
  }
  return s * h;
}

double sampled_sup(const Profile& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double m = -kInf;
  for (int k = 0; k < n; ++k) {
    const double v = f(a + (k + 0.5) * h);
    if (!std::isfinite(v)) return kInf;
    m = std::max(m, v);
  }
  return m;
}

bool stable(double coarse, double fine, double rel_tol, double* change) {
  if (!std::isfinite(coarse) || !std::isfinite(fine)) {
    *change = kInf;
    return false;
  }
  if (fine == 0.0 && coarse == 0.0) {
    *change = 0.0;
    return true;
  }
  *change = std::abs(fine - coarse) / std::max(std::abs(fine), std::abs(coarse));
  return *change <= rel_tol;
}

}  // namespace

InitialData InitialData::make(GridPtr grid, Profile u0, Profile w0) {
  InitialData init{u0, w0, ScalarField::sample(grid, u0), ScalarField::sample(grid, w0)};
  bool any_positive = false;
  for (double v : init.u0_field.values()) {
    if (v < 0) throw DomainError("initial data: u0 must be nonnegative");
    any_positive = any_positive || v > 0;
  }
  if (!any_positive) throw DomainError("initial data: u0 must not vanish identically");
  for (double v : init.w0_field.values())
    if (v < 0) throw DomainError("initial data: w0 must be nonnegative");
  return init;
}

double InitialData::sqrt_w0_h1() const {
  const auto w = w0_field.values();
  const double h = w0_field.grid().h();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double q = (std::sqrt(w[i + 1]) - std::sqrt(w[i])) / h;
    s += q * q;
  }
  return s * h;
}

IntegralEstimate refined_midpoint(const Profile& f, double a, double b, std::vector<double> zeros, int n,
                                  double rel_tol) {
  n = safe_cell_count(a, b, n, zeros);
  IntegralEstimate e;
  const double coarse = midpoint_sum(f, a, b, n);
  const double fine = midpoint_sum(f, a, b, 2 * n);
  e.value = fine;
  e.cells = 2 * n;
  e.resolved = stable(coarse, fine, rel_tol, &e.refinement_change);
  return e;
}

IntegralEstimate inverse_integral(const CoefficientSpec& d, const SpatialGrid& grid) {
  const double a = grid.left(), b = grid.right();
  if (auto v = d.inverse_integral(a, b)) {
    IntegralEstimate e;
    e.value = *v;
    e.analytic = true;
    e.resolved = true;
    return e;
  }
  return refined_midpoint([&d](double x) { return 1.0 / d.value(x); }, a, b, d.zeros_in(a, b),
                          kHypothesisQuadratureCells);
}

HypothesisReport validate_hypotheses(const CoefficientSpec& d, const InitialData& init, const SpatialGrid& grid,
                                     const AbsorptionSpec& g) {
  const double a = grid.left(), b = grid.right();
  HypothesisReport r;
  r.zeros = d.zeros_in(a, b);
  const int n = kHypothesisQuadratureCells;

  r.integral_inv_d = inverse_integral(d, grid);

  if (auto v = d.inverse_log_integral(a, b)) {
    r.integral_inv_d_log.value = *v;
    r.integral_inv_d_log.analytic = true;
    r.integral_inv_d_log.resolved = true;
  } else {
    r.integral_inv_d_log = refined_midpoint(
        [&d](double x) {
          const double v = d.value(x);
          return -std::log(v) / v;
        },
        a, b, r.zeros, n);
  }

  const Profile& w0 = init.w0;
  r.integral_w0_weight = refined_midpoint(
      [&](double x) {
        const auto c = d.eval(x);
        if (!c.dx) return kInf;
        return (*c.dx) * (*c.dx) / c.d * w0(x);
      },
      a, b, r.zeros, n);

  {
    const int m = safe_cell_count(a, b, n, r.zeros);
    auto ratio = [&](double x) { return w0(x) / d.value(x); };
    double coarse = sampled_sup(ratio, a, b, m);
    double fine = sampled_sup(ratio, a, b, 2 * m);
    for (double x : {a, b}) {
      if (d.value(x) > 0) {
        coarse = std::max(coarse, ratio(x));
        fine = std::max(fine, ratio(x));
      }
    }
    r.w0_over_d_sup.value = fine;
    r.w0_over_d_sup.cells = 2 * m;
    r.w0_over_d_sup.resolved = stable(coarse, fine, 0.01, &r.w0_over_d_sup.refinement_change);
  }

  const double w0_scale = 1.0 + init.w0_field.max();
  r.w0_vanishes_at_zeros = std::all_of(r.zeros.begin(), r.zeros.end(),
                                       [&](double z) { return std::abs(w0(z)) <= 1e-12 * w0_scale; });

  r.sqrt_w0_h1 = init.sqrt_w0_h1();

  auto& f = r.flags;
  f.d2 = r.integral_inv_d.finite();
  f.init = std::isfinite(r.sqrt_w0_h1);
  f.w0_weight = r.integral_w0_weight.finite();
  f.log_integrable = r.integral_inv_d_log.finite();
  f.w0_over_d = r.w0_over_d_sup.finite();
  f.absorption = g.check_bounds();
  f.theorem1 = f.d2 && f.init && f.w0_weight && f.absorption;
  f.theorem2 = f.theorem1;
  f.theorem3 = f.theorem1 && f.log_integrable && f.w0_over_d;

  if (!f.d2) r.notes.push_back("(d2) integral of 1/d unresolved under refinement: treated as divergent");
  if (!f.w0_weight) r.notes.push_back("(w0) integral of (d_x^2/d) w0 unresolved under refinement");
  if (!r.w0_vanishes_at_zeros) r.notes.push_back("w0 does not vanish at every zero of d");
  {
    // Growth of the discrete sqrt(w0) seminorm under refinement hints at sqrt(w0) outside W^{1,2}.
    auto fine_grid = std::make_shared<const SpatialGrid>(grid.refined(3));
    const auto fine = InitialData{init.u0, init.w0, init.u0_field, ScalarField::sample(fine_grid, init.w0)};
    const double ratio = fine.sqrt_w0_h1() / std::max(r.sqrt_w0_h1, 1e-300);
    if (r.sqrt_w0_h1 > 0 && ratio > 1.05) {
      std::ostringstream os;
      os << "discrete sqrt(w0) seminorm grows by factor " << ratio << " under 3x refinement";
      r.notes.push_back(os.str());
    }
  }
  return r;
}

double mu_infinity(const ScalarField& u0, const CoefficientSpec& d, const SpatialGrid& grid) {
  const auto inv = inverse_integral(d, grid);
  if (!inv.finite()) throw HypothesisError("(d2): integral of 1/d is not finite, mu_infinity undefined");
  return u0.integral() / inv.value;
}

std::vector<double> cell_inverse_integrals(const CoefficientSpec& d, const SpatialGrid& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.size()));
  const double h = grid.h();
  const std::vector<double> zeros = d.zeros_in(grid.left(), grid.right());
  // Cell edges that round off a zero of d would shift the singular part of the integral.
  auto snap = [&](double x) {
    for (double z : zeros)
      if (std::abs(x - z) < 1e-9 * h) return z;
    return x;
  };
  for (int i = 0; i < grid.size(); ++i) {
    const double lo = snap(grid.left() + i * h);
    const double hi = (i + 1 == grid.size()) ? grid.right() : snap(grid.left() + (i + 1) * h);
    if (auto v = d.inverse_integral(lo, hi)) {
      out[static_cast<std::size_t>(i)] = *v;
    } else {
      const double dv = d.value(grid.center(i));
      out[static_cast<std::size_t>(i)] = dv > 0 ? h / dv : kInf;
    }
  }
  return out;
}

double greedy_sup(std::vector<double> cell_integrals, double h, double delta) {
  std::sort(cell_integrals.begin(), cell_integrals.end(), std::greater<>());
  double measure = 0.0, acc = 0.0;
  for (double c : cell_integrals) {
    if (measure + h <= delta * (1.0 + 1e-12)) {
      acc += c;
      measure += h;
    } else {
      const double frac = (delta - measure) / h;
      if (frac > 0) acc += frac * c;
      break;
    }
  }
  return acc;
}

double omega_d(const CoefficientSpec& d, const SpatialGrid& grid, double delta) {
  if (!(delta > 0) || delta > grid.length() * (1 + 1e-12)) throw DomainError("omega_d: need 0 < delta <= |Omega|");
  return greedy_sup(cell_inverse_integrals(d, grid), grid.h(), delta);
}

}  // namespace myopic
