#include "myopic/oracle.hh"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "myopic/errors.hh"

namespace myopic {

double heat_neumann(double x, double t, int k, double L, double diffusivity, double left) {
  const double kappa = k * std::numbers::pi / L;
  return 1.0 + std::cos(kappa * (x - left)) * std::exp(-diffusivity * kappa * kappa * t);
}

double absorption_ode(double w0_val, double u_const, const AbsorptionSpec& g, double t) {
  if (!(w0_val > 0.0)) throw DomainError("absorption_ode: w0 must be positive");
  if (t <= 0.0 || u_const == 0.0) return w0_val;
  if (g.kind() == AbsorptionSpec::Kind::Linear) return w0_val * std::exp(-u_const * t);
  namespace ode = boost::numeric::odeint;
  double w = w0_val;
  auto rhs = [&](const double& y, double& dy, double) { dy = -u_const * g.g(y); };
  ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<double>()), rhs, w, 0.0, t,
                          1e-3);
  return w;
}

ReferenceSolution ReferenceSolution::heat_mode(double amplitude, int k, double left, double L, double diffusivity) {
  return {Kind::HeatNeumannMode, [=](double x, double t) {
            return 1.0 + amplitude * (heat_neumann(x, t, k, L, diffusivity, left) - 1.0);
          }};
}

ReferenceSolution ReferenceSolution::absorption(double w0_val, double u_const, AbsorptionSpec g) {
  return {Kind::AbsorptionODE, [=](double, double t) { return absorption_ode(w0_val, u_const, g, t); }};
}

ReferenceSolution ReferenceSolution::steady_profile(double mu_inf, ScalarField d_eps) {
  return {Kind::SteadyProfile, [mu_inf, d = std::move(d_eps)](double x, double) {
            const SpatialGrid& grid = d.grid();
            const int i = std::clamp(static_cast<int>((x - grid.left()) / grid.h()), 0, grid.size() - 1);
            return mu_inf / d[i];
          }};
}

std::vector<double> moment_against_test_functions(const SimState& s, std::span<const ScalarField> tests) {
  const double h = s.u.grid().h();
  std::vector<double> out;
  out.reserve(tests.size());
  for (const ScalarField& phi : tests) {
    if (phi.size() != s.u.size()) throw DomainError("test function lives on a different grid");
    double m = 0.0;
    for (int i = 0; i < phi.size(); ++i) m += s.u[i] * phi[i] * h;
    out.push_back(m);
  }
  return out;
}

std::vector<TestFunction> standard_test_panel(const ScalarField& d_eps) {
  const GridPtr& grid = d_eps.grid_ptr();
  const double a = grid->left();
  const double L = grid->length();
  auto indicator = [&](double lo, double hi) {
    return ScalarField::sample(grid, [=](double x) {
      const double s = (x - a) / L;
      return s >= lo && s < hi ? 1.0 : 0.0;
    });
  };
  std::vector<TestFunction> panel;
  panel.push_back({"constant", ScalarField(grid, 1.0)});
  panel.push_back({"left_half", indicator(0.0, 0.5)});
  panel.push_back({"right_half", indicator(0.5, 1.0)});
  panel.push_back({"quarter_1", indicator(0.0, 0.25)});
  panel.push_back({"quarter_2", indicator(0.25, 0.5)});
  panel.push_back({"quarter_3", indicator(0.5, 0.75)});
  panel.push_back({"d_eps", d_eps});
  panel.push_back({"sawtooth", ScalarField::sample(grid, [=](double x) {
                     const double s = 2.0 * (x - a) / L;
                     return s - std::floor(s);
                   })});
  return panel;
}

double convergence_order(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size()) throw DomainError("convergence_order: size mismatch");
  if (hs.size() < 3) throw DomainError("convergence_order: at least three (h, error) pairs required");
  const bool increasing = hs[1] > hs[0];
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (!(errors[k] > 0.0) || !(hs[k] > 0.0)) throw DomainError("convergence_order: errors and h must be positive");
    if (k > 0 && (increasing ? !(hs[k] > hs[k - 1]) : !(hs[k] < hs[k - 1])))
      throw DomainError("convergence_order: h must be strictly monotone");
  }
  const double n = static_cast<double>(hs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double x = std::log(hs[k]);
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace myopic
