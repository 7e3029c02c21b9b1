#include "magnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "magnls/errors.hpp"
#include "magnls/parallel.hpp"

namespace magnls {

Grid::Grid(std::array<int, 3> dims, std::array<double, 3> half_widths)
    : dims_(dims), half_widths_(half_widths) {
  for (int j = 0; j < 3; ++j) {
    if (dims_[j] < 8 || dims_[j] % 2 != 0)
      throw InvalidArgument("grid: n" + std::to_string(j + 1) + " must be even and >= 8");
    if (!(half_widths_[j] > 0.0) || !std::isfinite(half_widths_[j]))
      throw InvalidArgument("grid: half-width L" + std::to_string(j + 1) + " must be positive");
  }
}

double Grid::wavenumber(int axis, int i) const {
  const int n = dims_[axis];
  const int m = i < n / 2 ? i : i - n;
  return std::numbers::pi * m / half_widths_[axis];
}

std::vector<double> Grid::coords(int axis) const {
  std::vector<double> out(dims_[axis]);
  for (int i = 0; i < dims_[axis]; ++i) out[i] = coord(axis, i);
  return out;
}

std::vector<double> Grid::wavenumbers(int axis) const {
  std::vector<double> out(dims_[axis]);
  for (int i = 0; i < dims_[axis]; ++i) out[i] = wavenumber(axis, i);
  return out;
}

std::array<int, 3> Grid::unravel(std::size_t idx) const {
  const int i2 = static_cast<int>(idx % dims_[2]);
  idx /= dims_[2];
  const int i1 = static_cast<int>(idx % dims_[1]);
  const int i0 = static_cast<int>(idx / dims_[1]);
  return {i0, i1, i2};
}

void Params::validate() const {
  if (!(b != 0.0) || !std::isfinite(b)) throw InvalidArgument("params: b must be nonzero");
  if (!(alpha > 0.0 && alpha < 4.0)) throw InvalidArgument("params: alpha must lie in (0,4)");
}

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), complex(0.0, 0.0)) {}

Field::Field(Grid grid, std::vector<complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_shape();
}

bool Field::all_finite() const {
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void Field::check_shape() const {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field: value count " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_.size()));
}

Field& Field::operator+=(const Field& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(complex s, Field a) { return a *= s; }

complex inner(const Field& f, const Field& g) {
  f.check_shape();
  g.check_shape();
  if (!(f.grid() == g.grid())) throw InvalidArgument("inner: grid mismatch");
  const auto s = reduce_sums<2>(f.size(), [&](std::size_t i, double* v) {
    const complex p = f[i] * std::conj(g[i]);
    v[0] = p.real();
    v[1] = p.imag();
  });
  const double dv = f.grid().cell_volume();
  return {s[0] * dv, s[1] * dv};
}

double l2_norm(const Field& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

}  // namespace magnls
