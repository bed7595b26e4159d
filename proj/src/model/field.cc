#include "myopic/field.hh"

#include <algorithm>
#include <cmath>

#include "myopic/errors.hh"

namespace myopic {

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("field: null grid");
  if (static_cast<int>(values_.size()) != grid_->size())
    throw DomainError("field: length does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("field: non-finite value");
}

ScalarField::ScalarField(GridPtr grid, double value)
    : ScalarField(grid, std::vector<double>(static_cast<std::size_t>(grid ? grid->size() : 0), value)) {}

ScalarField ScalarField::sample(GridPtr grid, const Profile& f) {
  std::vector<double> v;
  v.reserve(grid->centers().size());
  for (double x : grid->centers()) v.push_back(f(x));
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_->h();
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

}  // namespace myopic
