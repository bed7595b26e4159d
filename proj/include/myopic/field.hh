#ifndef MYOPIC_FIELD_HH_
#define MYOPIC_FIELD_HH_

#include <functional>
#include <span>
#include <vector>

#include "myopic/grid.hh"

namespace myopic {

/// Real function of x, e.g. an initial profile given analytically.
using Profile = std::function<double(double)>;

/// One finite value per cell center of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr grid, std::vector<double> values);
  ScalarField(GridPtr grid, double value);

  static ScalarField sample(GridPtr grid, const Profile& f);

  const SpatialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double integral() const;  // sum of values times h
  double max() const;
  double min() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace myopic

#endif
