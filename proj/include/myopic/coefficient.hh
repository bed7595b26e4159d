#ifndef MYOPIC_COEFFICIENT_HH_
#define MYOPIC_COEFFICIENT_HH_

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace myopic {

/// d(x) together with d_x(x); the derivative is absent exactly where d(x) = 0.
struct CoefficientValue {
  double d = 0.0;
  std::optional<double> dx;
};

struct PowerLawFactor {
  double x0 = 0.0;
  double theta = 0.5;
};

/// Symbolic motility coefficient d(x) >= 0.
///
/// Kinds:
///   constant      d = c
///   power law     d = scale |x - x0|^theta,  theta in (0,1)
///   product       d = scale prod_k |x - x0_k|^theta_k
///   tabulated     piecewise linear through equally spaced samples on [left, right]
///
/// Power laws with theta >= 1 violate integrability of 1/d; they are only
/// constructible through pathological_power_law() and never report analytic
/// integrals, so the divergence has to be detected numerically.
class CoefficientSpec {
 public:
  struct Constant {
    double value;
  };
  struct PowerLaw {
    double x0;
    double theta;
    double scale;
    bool pathological;
  };
  struct Product {
    std::vector<PowerLawFactor> factors;
    double scale;
  };
  struct Tabulated {
    double left;
    double right;
    std::vector<double> samples;
  };

  static CoefficientSpec constant(double c);
  static CoefficientSpec power_law(double x0, double theta, double scale = 1.0);
  static CoefficientSpec pathological_power_law(double x0, double theta, double scale = 1.0);
  static CoefficientSpec product(std::vector<PowerLawFactor> factors, double scale = 1.0);
  static CoefficientSpec tabulated(double left, double right, std::vector<double> samples);

  CoefficientValue eval(double x) const;
  double value(double x) const;

  /// Zeros of d in [a, b], sorted. Exact for the analytic kinds; for tabulated
  /// data these are the sample points with value 0.
  std::vector<double> zeros_in(double a, double b) const;

  /// Closed-form integral of 1/d over [a, b] when available.
  std::optional<double> inverse_integral(double a, double b) const;
  /// Closed-form integral of (1/d) ln(1/d) over [a, b] when available.
  std::optional<double> inverse_log_integral(double a, double b) const;

  bool analytic_inverse_integral() const;
  bool analytic_derivative() const;

  /// max of d over [a, b], sampled on a fine lattice plus the kink points.
  double sup_on(double a, double b, int samples = 512) const;

  std::string describe() const;

  const std::variant<Constant, PowerLaw, Product, Tabulated>& kind() const { return kind_; }

 private:
  explicit CoefficientSpec(std::variant<Constant, PowerLaw, Product, Tabulated> k) : kind_(std::move(k)) {}
  std::variant<Constant, PowerLaw, Product, Tabulated> kind_;
};

}  // namespace myopic

#endif
