#include "myopic/coefficient.hh"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "myopic/errors.hh"

namespace myopic {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sgn(double v) { return (v > 0) - (v < 0); }

// Antiderivative of 1/(scale |x-x0|^theta), odd about x0.
double inverse_antiderivative(double x, double x0, double theta, double scale) {
  const double r = std::abs(x - x0);
  return sgn(x - x0) * std::pow(r, 1.0 - theta) / ((1.0 - theta) * scale);
}

// Antiderivative of (1/d) ln(1/d) for d = scale |x-x0|^theta, odd about x0.
double inverse_log_antiderivative(double x, double x0, double theta, double scale) {
  const double r = std::abs(x - x0);
  if (r == 0.0) return 0.0;
  const double q = 1.0 - theta;
  const double rq = std::pow(r, q);
  const double g = (-std::log(scale) * rq / q - theta * (rq * std::log(r) / q - rq / (q * q))) / scale;
  return sgn(x - x0) * g;
}

}  // namespace

CoefficientSpec CoefficientSpec::constant(double c) {
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("constant coefficient must be positive");
  return CoefficientSpec(Constant{c});
}

CoefficientSpec CoefficientSpec::power_law(double x0, double theta, double scale) {
  if (!(theta > 0 && theta < 1)) throw DomainError("power law exponent must lie in (0,1)");
  if (!(scale > 0)) throw DomainError("power law scale must be positive");
  return CoefficientSpec(PowerLaw{x0, theta, scale, false});
}

CoefficientSpec CoefficientSpec::pathological_power_law(double x0, double theta, double scale) {
  if (!(theta > 0)) throw DomainError("power law exponent must be positive");
  if (!(scale > 0)) throw DomainError("power law scale must be positive");
  return CoefficientSpec(PowerLaw{x0, theta, scale, true});
}

CoefficientSpec CoefficientSpec::product(std::vector<PowerLawFactor> factors, double scale) {
  if (factors.empty()) throw DomainError("product coefficient needs at least one factor");
  if (!(scale > 0)) throw DomainError("product scale must be positive");
  for (const auto& f : factors)
    if (!(f.theta > 0)) throw DomainError("product exponents must be positive");
  return CoefficientSpec(Product{std::move(factors), scale});
}

CoefficientSpec CoefficientSpec::tabulated(double left, double right, std::vector<double> samples) {
  if (!(right > left)) throw DomainError("tabulated coefficient: need left < right");
  if (samples.size() < 2) throw DomainError("tabulated coefficient: need at least two samples");
  for (double s : samples)
    if (!(s >= 0) || !std::isfinite(s)) throw DomainError("tabulated coefficient: samples must be finite and >= 0");
  return CoefficientSpec(Tabulated{left, right, std::move(samples)});
}

CoefficientValue CoefficientSpec::eval(double x) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return CoefficientValue{c.value, 0.0}; },
          [x](const PowerLaw& p) {
            const double r = std::abs(x - p.x0);
            if (r == 0.0) return CoefficientValue{0.0, std::nullopt};
            const double d = p.scale * std::pow(r, p.theta);
            return CoefficientValue{d, p.theta * d / (x - p.x0)};
          },
          [x](const Product& p) {
            double d = p.scale;
            double log_slope = 0.0;
            for (const auto& f : p.factors) {
              const double r = std::abs(x - f.x0);
              if (r == 0.0) return CoefficientValue{0.0, std::nullopt};
              d *= std::pow(r, f.theta);
              log_slope += f.theta / (x - f.x0);
            }
            return CoefficientValue{d, d * log_slope};
          },
          [x](const Tabulated& t) {
            const int n = static_cast<int>(t.samples.size());
            const double dx = (t.right - t.left) / (n - 1);
            const double xc = std::clamp(x, t.left, t.right);
            int k = static_cast<int>(std::floor((xc - t.left) / dx));
            k = std::clamp(k, 0, n - 2);
            const double s0 = t.samples[static_cast<std::size_t>(k)];
            const double s1 = t.samples[static_cast<std::size_t>(k + 1)];
            const double theta = (xc - (t.left + k * dx)) / dx;
            const double d = (1.0 - theta) * s0 + theta * s1;
            if (d <= 0.0) return CoefficientValue{0.0, std::nullopt};
            return CoefficientValue{d, (s1 - s0) / dx};
          },
      },
      kind_);
}

double CoefficientSpec::value(double x) const { return eval(x).d; }

std::vector<double> CoefficientSpec::zeros_in(double a, double b) const {
  std::vector<double> z;
  auto keep = [&](double x) {
    if (x >= a && x <= b) z.push_back(x);
  };
  std::visit(Overloaded{
                 [](const Constant&) {},
                 [&](const PowerLaw& p) { keep(p.x0); },
                 [&](const Product& p) {
                   for (const auto& f : p.factors) keep(f.x0);
                 },
                 [&](const Tabulated& t) {
                   const int n = static_cast<int>(t.samples.size());
                   const double dx = (t.right - t.left) / (n - 1);
                   for (int k = 0; k < n; ++k)
                     if (t.samples[static_cast<std::size_t>(k)] == 0.0) keep(t.left + k * dx);
                 },
             },
             kind_);
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

bool CoefficientSpec::analytic_inverse_integral() const {
  if (std::holds_alternative<Constant>(kind_)) return true;
  if (const auto* p = std::get_if<PowerLaw>(&kind_)) return !p->pathological;
  return false;
}

bool CoefficientSpec::analytic_derivative() const { return !std::holds_alternative<Tabulated>(kind_); }

std::optional<double> CoefficientSpec::inverse_integral(double a, double b) const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return (b - a) / c->value;
  if (const auto* p = std::get_if<PowerLaw>(&kind_); p && !p->pathological)
    return inverse_antiderivative(b, p->x0, p->theta, p->scale) - inverse_antiderivative(a, p->x0, p->theta, p->scale);
  return std::nullopt;
}

std::optional<double> CoefficientSpec::inverse_log_integral(double a, double b) const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return (b - a) * (-std::log(c->value)) / c->value;
  if (const auto* p = std::get_if<PowerLaw>(&kind_); p && !p->pathological)
    return inverse_log_antiderivative(b, p->x0, p->theta, p->scale) -
           inverse_log_antiderivative(a, p->x0, p->theta, p->scale);
  return std::nullopt;
}

double CoefficientSpec::sup_on(double a, double b, int samples) const {
  double m = std::max(value(a), value(b));
  for (int k = 1; k < samples; ++k) m = std::max(m, value(a + (b - a) * k / samples));
  if (const auto* t = std::get_if<Tabulated>(&kind_)) {
    const int n = static_cast<int>(t->samples.size());
    const double dx = (t->right - t->left) / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double x = t->left + k * dx;
      if (x > a && x < b) m = std::max(m, t->samples[static_cast<std::size_t>(k)]);
    }
  }
  return m;
}

std::string CoefficientSpec::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Constant& c) { os << "constant(" << c.value << ")"; },
                 [&](const PowerLaw& p) {
                   os << (p.pathological ? "pathological_" : "") << "power_law(x0=" << p.x0 << ", theta=" << p.theta
                      << ", scale=" << p.scale << ")";
                 },
                 [&](const Product& p) {
                   os << "product(scale=" << p.scale;
                   for (const auto& f : p.factors) os << ", |x-" << f.x0 << "|^" << f.theta;
                   os << ")";
                 },
                 [&](const Tabulated& t) { os << "tabulated(" << t.samples.size() << " samples)"; },
             },
             kind_);
  return os.str();
}

}  // namespace myopic
