#ifndef MYOPIC_GRID_HH_
#define MYOPIC_GRID_HH_

#include <memory>
#include <span>
#include <vector>

namespace myopic {

/// Uniform cell-centered mesh on [left, right]. Cell i has center
/// left + (i + 1/2) h. Prescribed zeros of the diffusion coefficient must not
/// sit on a cell center; the constructor rejects such grids.
class SpatialGrid {
 public:
  SpatialGrid(double left, double right, int n_cells, std::span<const double> zeros = {});

  double left() const { return left_; }
  double right() const { return right_; }
  double length() const { return right_ - left_; }
  int size() const { return n_; }
  double h() const { return h_; }
  double center(int i) const { return centers_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& centers() const { return centers_; }

  /// Cell-centered refinement by an odd factor keeps every coarse center as a
  /// fine center (fine index factor*i + factor/2).
  SpatialGrid refined(int factor) const;

  static constexpr int kMinCells = 8;

 private:
  SpatialGrid(double left, double right, int n_cells, bool unchecked);

  double left_;
  double right_;
  int n_;
  double h_;
  std::vector<double> centers_;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

}  // namespace myopic

#endif
