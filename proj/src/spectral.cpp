#include "magnls/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

#include "magnls/errors.hpp"

namespace magnls {

namespace spectral {

namespace {

struct AxisPlans {
  fftw_plan fwd[3] = {nullptr, nullptr, nullptr};
  fftw_plan bwd[3] = {nullptr, nullptr, nullptr};
};

std::mutex g_plan_mu;

fftw_plan make_plan(const std::array<int, 3>& d, int axis, int sign) {
  const int n0 = d[0], n1 = d[1], n2 = d[2];
  int n = 0, howmany = 0, stride = 0, dist = 0;
  std::size_t span = 0;
  switch (axis) {
    case 2: n = n2; howmany = n1; stride = 1; dist = n2; span = static_cast<std::size_t>(n1) * n2; break;
    case 1: n = n1; howmany = n2; stride = n2; dist = 1; span = static_cast<std::size_t>(n1) * n2; break;
    default: n = n0; howmany = n2; stride = n1 * n2; dist = 1;
      span = static_cast<std::size_t>(n0) * n1 * n2; break;
  }
  auto* buf = fftw_alloc_complex(span);
  fftw_plan p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride,
                                   dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p) throw NumericalFailure("fftw: plan creation failed");
  return p;
}

const AxisPlans& plans_for(const Grid& g) {
  static std::map<std::array<int, 3>, std::unique_ptr<AxisPlans>> cache;
  std::lock_guard lock(g_plan_mu);
  auto& slot = cache[g.dims()];
  if (!slot) {
    auto p = std::make_unique<AxisPlans>();
    for (int a = 0; a < 3; ++a) {
      p->fwd[a] = make_plan(g.dims(), a, FFTW_FORWARD);
      p->bwd[a] = make_plan(g.dims(), a, FFTW_BACKWARD);
    }
    slot = std::move(p);
  }
  return *slot;
}

}  // namespace

std::size_t axis_chunks(const Grid& g, int axis) {
  return static_cast<std::size_t>(axis == 0 ? g.n(1) : g.n(0));
}

void transform_chunk(const Grid& g, complex* data, int axis, std::size_t chunk, int sign) {
  const AxisPlans& p = plans_for(g);
  const std::size_t offset =
      axis == 0 ? chunk * g.n(2) : chunk * static_cast<std::size_t>(g.n(1)) * g.n(2);
  auto* ptr = reinterpret_cast<fftw_complex*>(data + offset);
  fftw_execute_dft(sign < 0 ? p.fwd[axis] : p.bwd[axis], ptr, ptr);
}

void forward(Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  for (int axis = 2; axis >= 0; --axis)
    parallel_for(axis_chunks(g, axis),
                 [&](std::size_t c) { transform_chunk(g, f.data(), axis, c, -1); });
}

void backward(Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  for (int axis = 0; axis < 3; ++axis)
    parallel_for(axis_chunks(g, axis),
                 [&](std::size_t c) { transform_chunk(g, f.data(), axis, c, +1); });
  const double s = 1.0 / static_cast<double>(g.size());
  complex* d = f.data();
  parallel_for(static_cast<std::size_t>(g.n(0)), [&](std::size_t c) {
    const std::size_t m = static_cast<std::size_t>(g.n(1)) * g.n(2);
    for (std::size_t i = c * m; i < (c + 1) * m; ++i) d[i] *= s;
  });
}

}  // namespace spectral

Field apply_laplacian(const Field& f) {
  f.check_shape();
  Field out = f;
  spectral::forward(out);
  const Grid& g = f.grid();
  const auto k0 = g.wavenumbers(0), k1 = g.wavenumbers(1), k2 = g.wavenumbers(2);
  for (int i0 = 0; i0 < g.n(0); ++i0)
    for (int i1 = 0; i1 < g.n(1); ++i1)
      for (int i2 = 0; i2 < g.n(2); ++i2)
        out[g.index(i0, i1, i2)] *= -(k0[i0] * k0[i0] + k1[i1] * k1[i1] + k2[i2] * k2[i2]);
  spectral::backward(out);
  return out;
}

Field partial_derivative(const Field& f, int axis) {
  f.check_shape();
  Field out = f;
  const auto k = f.grid().wavenumbers(axis);
  spectral::apply_axis_multiplier(out, axis,
                                  [&](std::size_t, int ki) { return complex(0.0, k[ki]); });
  return out;
}

std::array<Field, 3> gradient(const Field& f) {
  return {partial_derivative(f, 0), partial_derivative(f, 1), partial_derivative(f, 2)};
}

Field apply_Lz(const Field& f) {
  const Grid& g = f.grid();
  Field d0 = partial_derivative(f, 0);
  const Field d1 = partial_derivative(f, 1);
  const auto x0 = g.coords(0), x1 = g.coords(1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto ix = g.unravel(i);
    d0[i] = complex(0.0, 1.0) * (x1[ix[1]] * d0[i] - x0[ix[0]] * d1[i]);
  }
  return d0;
}

Field apply_magnetic_hamiltonian(const Field& f, const Params& p) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1);
  const auto k0 = g.wavenumbers(0), k1 = g.wavenumbers(1), k2 = g.wavenumbers(2);
  // Axis-0 chunks are indexed by i1, axis-1 chunks by i0.
  Field a = f, c = f;
  Field out = f;
  spectral::apply_axis_multiplier(a, 0, [&](std::size_t idx, int k) {
    return complex(k0[k] * k0[k] - p.b * x1[g.unravel(idx)[1]] * k0[k], 0.0);
  });
  spectral::apply_axis_multiplier(c, 1, [&](std::size_t idx, int k) {
    return complex(k1[k] * k1[k] + p.b * x0[g.unravel(idx)[0]] * k1[k], 0.0);
  });
  spectral::apply_axis_multiplier(out, 2, [&](std::size_t, int k) { return complex(k2[k] * k2[k], 0.0); });
  const double q = 0.25 * p.b * p.b;
  const int n1 = g.n(1), n2 = g.n(2);
  complex* o = out.data();
  parallel_for(static_cast<std::size_t>(g.n(0)), [&](std::size_t i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double v = q * (x0[i0] * x0[i0] + x1[i1] * x1[i1]);
      const std::size_t base = g.index(static_cast<int>(i0), i1, 0);
      for (int i2 = 0; i2 < n2; ++i2) o[base + i2] += a[base + i2] + c[base + i2] + v * f[base + i2];
    }
  });
  return out;
}

std::array<Field, 3> covariant_gradient(const Field& f, const Params& p) {
  auto grad = gradient(f);
  const Grid& g = f.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1);
  const double hb = 0.5 * p.b;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto ix = g.unravel(i);
    grad[0][i] += complex(0.0, -hb * x1[ix[1]]) * f[i];
    grad[1][i] += complex(0.0, hb * x0[ix[0]]) * f[i];
  }
  return grad;
}

}  // namespace magnls
