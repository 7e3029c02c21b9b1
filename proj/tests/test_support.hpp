#pragma once

#include <cmath>
#include <functional>

#include "magnls/grid.hpp"

namespace magnls::test {

inline Field sample(const Grid& g, const std::function<complex(double, double, double)>& fn) {
  Field f(g);
  for (int i = 0; i < g.n(0); ++i)
    for (int j = 0; j < g.n(1); ++j)
      for (int k = 0; k < g.n(2); ++k) f[g.index(i, j, k)] = fn(g.coord(0, i), g.coord(1, j), g.coord(2, k));
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace magnls::test
