#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace magnls {

using complex = std::complex<double>;

/// Periodic box [-L1,L1) x [-L2,L2) x [-L3,L3) sampled at n1 x n2 x n3
/// points. Point i along axis j sits at -L_j + i*h_j (cell-left), and the
/// storage order is row-major with axis 2 contiguous.
class Grid {
 public:
  Grid(std::array<int, 3> dims, std::array<double, 3> half_widths);

  const std::array<int, 3>& dims() const { return dims_; }
  const std::array<double, 3>& half_widths() const { return half_widths_; }
  int n(int axis) const { return dims_[axis]; }
  double half_width(int axis) const { return half_widths_[axis]; }
  double spacing(int axis) const { return 2.0 * half_widths_[axis] / dims_[axis]; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }

  double coord(int axis, int i) const { return -half_widths_[axis] + i * spacing(axis); }
  /// Discrete Fourier frequency pi*m/L for index i in standard DFT order
  /// (m = 0..n/2-1, -n/2..-1).
  double wavenumber(int axis, int i) const;
  std::vector<double> coords(int axis) const;
  std::vector<double> wavenumbers(int axis) const;

  std::size_t index(int i0, int i1, int i2) const {
    return (static_cast<std::size_t>(i0) * dims_[1] + i1) * dims_[2] + i2;
  }
  /// Inverse of index().
  std::array<int, 3> unravel(std::size_t idx) const;

  bool operator==(const Grid& o) const {
    return dims_ == o.dims_ && half_widths_ == o.half_widths_;
  }

 private:
  std::array<int, 3> dims_;
  std::array<double, 3> half_widths_;
};

/// Magnetic strength b and nonlinearity power alpha.
struct Params {
  double b = 1.0;
  double alpha = 2.0;

  void validate() const;
};

/// Complex wavefunction sampled on a Grid.
class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<complex> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  complex* data() { return values_.data(); }
  const complex* data() const { return values_.data(); }
  std::vector<complex>& values() { return values_; }
  const std::vector<complex>& values() const { return values_; }
  complex& operator[](std::size_t i) { return values_[i]; }
  const complex& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;
  /// Throws InvalidArgument when the value count does not match the grid.
  void check_shape() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(complex s);

 private:
  Grid grid_;
  std::vector<complex> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(complex s, Field a);

/// L2 inner product <f, g> = sum f * conj(g) * dV.
complex inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

}  // namespace magnls
