#include "myopic/grid.hh"

#include <cmath>
#include <string>

#include "myopic/errors.hh"

namespace myopic {

SpatialGrid::SpatialGrid(double left, double right, int n_cells, bool /*unchecked*/)
    : left_(left), right_(right), n_(n_cells), h_((right - left) / n_cells) {
  centers_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) centers_[static_cast<std::size_t>(i)] = left_ + (i + 0.5) * h_;
}

SpatialGrid::SpatialGrid(double left, double right, int n_cells, std::span<const double> zeros)
    : SpatialGrid(left, right, n_cells, true) {
  if (!std::isfinite(left) || !std::isfinite(right) || !(right > left))
    throw DomainError("grid: need finite left < right");
  if (n_cells < kMinCells)
    throw DomainError("grid: n_cells must be at least " + std::to_string(kMinCells));
  const double tol = 1e-12 * length();
  for (double z : zeros) {
    if (z < left_ || z > right_) continue;
    const double s = (z - left_) / h_ - 0.5;
    const double k = std::round(s);
    if (k >= 0 && k < n_ && std::abs(z - centers_[static_cast<std::size_t>(k)]) <= tol)
      throw DomainError("grid: cell center coincides with a zero of d at x=" + std::to_string(z));
  }
}

SpatialGrid SpatialGrid::refined(int factor) const {
  if (factor < 1 || factor % 2 == 0) throw DomainError("grid: refinement factor must be odd");
  return SpatialGrid(left_, right_, n_ * factor, true);
}

}  // namespace myopic
