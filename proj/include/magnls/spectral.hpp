#pragma once

#include <array>
#include <cstddef>

#include "magnls/grid.hpp"
#include "magnls/parallel.hpp"

namespace magnls {

namespace spectral {

/// Work along one axis is split into fixed chunks (one 2D slab of lines
/// each); chunk boundaries depend on the grid only.
std::size_t axis_chunks(const Grid& g, int axis);

/// Unnormalized 1D DFT of every line of `chunk` along `axis`, in place.
/// sign = -1 forward, +1 backward.
void transform_chunk(const Grid& g, complex* data, int axis, std::size_t chunk, int sign);

/// Calls fn(flat_index, axis_index) for every point of a chunk.
template <class Fn>
void for_each_in_chunk(const Grid& g, int axis, std::size_t chunk, Fn&& fn) {
  const int n0 = g.n(0), n1 = g.n(1), n2 = g.n(2);
  const int c = static_cast<int>(chunk);
  switch (axis) {
    case 2:
    case 1:
      for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) fn(g.index(c, i1, i2), axis == 2 ? i2 : i1);
      break;
    default:
      for (int i0 = 0; i0 < n0; ++i0)
        for (int i2 = 0; i2 < n2; ++i2) fn(g.index(i0, c, i2), i0);
      break;
  }
}

/// Forward transform along `axis`, multiply each coefficient by
/// mult(flat_index, axis_index), transform back (normalized).
template <class Mult>
void apply_axis_multiplier(Field& f, int axis, Mult&& mult) {
  const Grid& g = f.grid();
  const double inv_n = 1.0 / g.n(axis);
  complex* data = f.data();
  parallel_for(axis_chunks(g, axis), [&](std::size_t c) {
    transform_chunk(g, data, axis, c, -1);
    for_each_in_chunk(g, axis, c, [&](std::size_t idx, int k) { data[idx] *= mult(idx, k) * inv_n; });
    transform_chunk(g, data, axis, c, +1);
  });
}

/// Full 3D transforms. forward is unnormalized; backward divides by N.
void forward(Field& f);
void backward(Field& f);

}  // namespace spectral

/// Spectral Laplacian.
Field apply_laplacian(const Field& f);
/// Spectral partial derivative along axis (0-based).
Field partial_derivative(const Field& f, int axis);
std::array<Field, 3> gradient(const Field& f);
/// L_z f = i (x1 d0 f - x0 d1 f) with 0-based axes.
Field apply_Lz(const Field& f);

/// -(grad + iA)^2 f = -Lap f + b L_z f + (b^2/4) rho^2 f.
Field apply_magnetic_hamiltonian(const Field& f, const Params& p);

/// Components of (grad + iA) f with A = (b/2)(-x1, x0, 0).
std::array<Field, 3> covariant_gradient(const Field& f, const Params& p);

}  // namespace magnls
