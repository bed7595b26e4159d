#ifndef MYOPIC_DIAGNOSTICS_HH_
#define MYOPIC_DIAGNOSTICS_HH_

#include <string>
#include <vector>

#include "myopic/absorption.hh"
#include "myopic/state.hh"

namespace myopic {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass_u = 0.0;
  double mass_w = 0.0;
  double w_inf = 0.0;
  double w_min = 0.0;
  double E1 = 0.0;  // sum u ln(d u) h
  double E2 = 0.0;  // (1/2) sum d w_x^2/g(w) h
  double E3 = 0.0;  // (og/ug^2) sum (d_x^2/d) w h
  double E_total = 0.0;
  double D1 = 0.0;  // sum over faces of ((d u)_x)^2/(d u) h
  double D2 = 0.0;  // (ug/(4 og)) sum d u w_x^2/w h
  double D3 = 0.0;  // (eps/2) sum g(w)^{-1/2} [(d w_x/sqrt(g(w)))_x]^2 h
  double mu = 0.0;  // mean of d u
  double dev_L1 = 0.0;
  double ln_du_min = 0.0;
  double ln_du_max = 0.0;
  double cum_dissipation = 0.0;
  double cum_wx_l2 = 0.0;
  double cum_dev_sq = 0.0;
  double equi_worst = 0.0;
};

/// Column order of the time-series CSV.
std::vector<std::string> record_columns();
std::vector<double> record_values(const DiagnosticsRecord& r);

/// Instantaneous integrands of the cumulative diagnostics.
struct InstantRates {
  double dissipation = 0.0;  // D1 + D2 + D3
  double wx_l2 = 0.0;        // sum w_x^2 h
  double dev_sq = 0.0;       // (sum |d u - mu| h)^2
  double uw = 0.0;           // sum u w h
};

/// Trapezoidal time integrals of the InstantRates.
struct Accumulators {
  double cum_dissipation = 0.0;
  double cum_wx_l2 = 0.0;
  double cum_dev_sq = 0.0;
  double cum_uw = 0.0;

  void advance(const InstantRates& before, const InstantRates& after, double dt);
};

/// w_x at cell centers: mean of the two adjacent face differences, boundary faces zero.
std::vector<double> centered_wx(const ScalarField& w);

/// The face-flux operator of the eps-diffusion of w: (d w_x/sqrt(g(w)))_x at
/// cell centers, with zero boundary fluxes and arithmetic face averages.
std::vector<double> w_flux_divergence(const ScalarField& w, const ScalarField& d_eps, const AbsorptionSpec& g);

InstantRates rates(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g);

DiagnosticsRecord record(const SimState& s, const FamilySlice& slice, const AbsorptionSpec& g,
                         const Accumulators& acc, double equi_delta);

/// Greedy sup of sum_E u h over cell sets E with |E| <= delta.
double equi_integrability(const SimState& s, double delta);

/// Source coefficient of the approximate energy inequality, sqrt(og^5 M eps)/(2 ug^4).
double energy_source(const AbsorptionSpec& g, double m_bound, double eps);

struct EnergyCheck {
  int violations = 0;
  double worst_excess = 0.0;  // max over sample pairs of the increase beyond the allowed slope
};

/// Counts sample pairs where E_total grows faster than energy_source * dt + tol_energy.
EnergyCheck energy_slope_check(const std::vector<DiagnosticsRecord>& records, const AbsorptionSpec& g,
                               double m_bound, double eps, double tol_energy);

struct StabilizationReport {
  double dev_rel = 0.0;  // dev_L1 / (mu_inf |Omega|)
  double mu_rel = 0.0;   // |mu(t_end) - mu_inf| / mu_inf
  double w_inf = 0.0;
  double dev_sq_last_decade_growth = 0.0;  // relative increase of cum_dev_sq over [0.9 T, T]
  bool dev_sq_saturated = false;           // growth < 5%
};

StabilizationReport stabilization_report(const std::vector<DiagnosticsRecord>& records, double mu_inf,
                                         double length);

struct BlowupReport {
  double max_ln_du = 0.0;      // max of ln_du_max over [tau, T]
  double max_neg_ln_du = 0.0;  // max of -ln_du_min over [tau, T]
  double c1 = 0.0;             // exp(max_neg_ln_du): d u >= 1/c1
  double c2 = 0.0;             // exp(max_ln_du): d u <= c2
  double ln_cubed_integral = 0.0;  // trapezoid of max(|ln_du_min|, |ln_du_max|)^3 over [tau, T]
};

/// Throws DomainError when tau >= t_end of the records.
BlowupReport blowup_report(const std::vector<DiagnosticsRecord>& records, double tau);

}  // namespace myopic

#endif
