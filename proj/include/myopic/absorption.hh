#ifndef MYOPIC_ABSORPTION_HH_
#define MYOPIC_ABSORPTION_HH_

#include <string>

namespace myopic {

/// Absorption rate g with g(0) = 0 and ug <= g' <= og on [0, inf).
///   linear                 g(s) = s                     (ug = og = 1)
///   bounded perturbation   g(s) = s + c (1 - e^{-s})    (ug = 1, og = 1 + c)
class AbsorptionSpec {
 public:
  enum class Kind { Linear, BoundedPerturbation };

  static AbsorptionSpec linear();
  static AbsorptionSpec bounded_perturbation(double c);

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double lower() const { return 1.0; }  // ug
  double upper() const { return 1.0 + c_; }  // og

  double g(double s) const;
  double dg(double s) const;
  /// g(s)/s, continuously extended by g'(0) for s below 1e-14.
  double g_over_s(double s) const;

  /// Samples g' on [0, s_max] and checks it stays inside [ug, og].
  bool check_bounds(double s_max = 50.0, int samples = 2001) const;

  std::string describe() const;

 private:
  AbsorptionSpec(Kind k, double c) : kind_(k), c_(c) {}
  Kind kind_;
  double c_;
};

}  // namespace myopic

#endif
