#include "myopic/absorption.hh"

#include <cmath>

#include "myopic/errors.hh"

namespace myopic {

AbsorptionSpec AbsorptionSpec::linear() { return AbsorptionSpec(Kind::Linear, 0.0); }

AbsorptionSpec AbsorptionSpec::bounded_perturbation(double c) {
  if (!(c >= 0) || !std::isfinite(c)) throw DomainError("absorption: perturbation constant must be >= 0");
  return AbsorptionSpec(Kind::BoundedPerturbation, c);
}

double AbsorptionSpec::g(double s) const {
  if (kind_ == Kind::Linear) return s;
  return s - c_ * std::expm1(-s);
}

double AbsorptionSpec::dg(double s) const {
  if (kind_ == Kind::Linear) return 1.0;
  return 1.0 + c_ * std::exp(-s);
}

double AbsorptionSpec::g_over_s(double s) const {
  if (s < 1e-14) return dg(0.0);
  if (kind_ == Kind::Linear) return 1.0;
  return 1.0 - c_ * std::expm1(-s) / s;
}

bool AbsorptionSpec::check_bounds(double s_max, int samples) const {
  if (g(0.0) != 0.0) return false;
  for (int k = 0; k < samples; ++k) {
    const double s = s_max * k / (samples - 1);
    const double d = dg(s);
    if (d < lower() - 1e-14 || d > upper() + 1e-14) return false;
  }
  return true;
}

std::string AbsorptionSpec::describe() const {
  if (kind_ == Kind::Linear) return "linear";
  return "bounded_perturbation(c=" + std::to_string(c_) + ")";
}

}  // namespace myopic
