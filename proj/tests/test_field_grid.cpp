#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/parallel.hpp"
#include "magnls/spectral.hpp"
#include "test_support.hpp"

using namespace magnls;
using magnls::test::max_abs;
using magnls::test::max_abs_diff;
using magnls::test::sample;

TEST_CASE("grid coordinates, wavenumbers and indexing") {
  const Grid g({8, 12, 10}, {2.0, 3.0, 1.0});
  CHECK(g.spacing(0) == doctest::Approx(0.5));
  CHECK(g.coord(0, 0) == -2.0);
  CHECK(g.coord(1, 11) == doctest::Approx(2.5));
  CHECK(g.wavenumber(0, 1) == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(g.wavenumber(0, 4) == doctest::Approx(-4 * std::numbers::pi / 2.0));
  CHECK(g.wavenumber(0, 7) == doctest::Approx(-std::numbers::pi / 2.0));
  for (std::size_t idx : {std::size_t{0}, std::size_t{17}, g.size() - 1}) {
    const auto ijk = g.unravel(idx);
    CHECK(g.index(ijk[0], ijk[1], ijk[2]) == idx);
  }
  CHECK_THROWS_AS(Grid({7, 8, 8}, {1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Grid({8, 8, 8}, {1.0, -1.0, 1.0}), InvalidArgument);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS((Params{0.0, 2.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((Params{1.0, 4.0}.validate()), InvalidArgument);
  CHECK_NOTHROW((Params{-0.5, 4.0 / 3.0}.validate()));
}

TEST_CASE("spectral derivative of a trigonometric field is exact") {
  const Grid g({16, 16, 16}, {std::numbers::pi, std::numbers::pi, std::numbers::pi});
  const Field f = sample(g, [](double x, double y, double z) { return complex(std::sin(2 * x) * std::cos(y), std::sin(3 * z)); });
  const Field d0 = partial_derivative(f, 0);
  const Field d2 = partial_derivative(f, 2);
  const Field e0 = sample(g, [](double x, double y, double) { return complex(2 * std::cos(2 * x) * std::cos(y), 0.0); });
  const Field e2 = sample(g, [](double, double, double z) { return complex(0.0, 3 * std::cos(3 * z)); });
  CHECK(max_abs_diff(d0, e0) < 1e-12);
  CHECK(max_abs_diff(d2, e2) < 1e-12);
}

TEST_CASE("forward then backward transform is the identity") {
  const Grid g({8, 10, 12}, {3.0, 4.0, 5.0});
  Field f = sample(g, [](double x, double y, double z) { return complex(std::exp(-x * x - y * y / 2), z * std::exp(-z * z)); });
  const Field orig = f;
  spectral::forward(f);
  spectral::backward(f);
  CHECK(max_abs_diff(f, orig) < 1e-14);
}

TEST_CASE("Laplacian of a Gaussian matches the closed form") {
  const Grid g({48, 48, 48}, {8.0, 8.0, 8.0});
  const Field f = sample(g, [](double x, double y, double z) { return complex(std::exp(-(x * x + y * y + z * z) / 2), 0.0); });
  const Field lap = apply_laplacian(f);
  const Field exact = sample(g, [](double x, double y, double z) {
    const double r2 = x * x + y * y + z * z;
    return complex((r2 - 3.0) * std::exp(-r2 / 2), 0.0);
  });
  CHECK(max_abs_diff(lap, exact) < 1e-10);
}

TEST_CASE("angular momentum eigenfunction") {
  const Grid g({48, 48, 16}, {8.0, 8.0, 4.0});
  const Field f = sample(g, [](double x, double y, double z) {
    return complex(x, y) * std::exp(-(x * x + y * y) / 2 - z * z);
  });
  CHECK(max_abs_diff(apply_Lz(f), f) < 1e-10);
  CHECK(angular_momentum(f) == doctest::Approx(mass(f)).epsilon(1e-10));
}

TEST_CASE("magnetic Hamiltonian on Landau states") {
  // (x1 + i x2) exp(-b rho^2/4) and (x1 - i x2) exp(-b rho^2/4) have transverse
  // energies 3b and b; the axial factor exp(-z^2/2) adds 1 - z^2.
  const double b = 2.0;
  const Grid g({48, 48, 48}, {8.0, 8.0, 8.0});
  for (int sign : {1, -1}) {
    const Field f = sample(g, [&](double x, double y, double z) {
      return complex(x, sign * y) * std::exp(-b * (x * x + y * y) / 4 - z * z / 2);
    });
    const double level = sign > 0 ? 3 * b : b;
    const Field hf = apply_magnetic_hamiltonian(f, {b, 2.0});
    const Field exact = sample(g, [&](double x, double y, double z) {
      return (level + 1.0 - z * z) * complex(x, sign * y) * std::exp(-b * (x * x + y * y) / 4 - z * z / 2);
    });
    CHECK(max_abs_diff(hf, exact) / max_abs(exact) < 1e-9);
  }
}

TEST_CASE("covariant gradient recombines to the magnetic Hamiltonian form") {
  const Grid g({32, 32, 32}, {7.0, 7.0, 7.0});
  const Params p{0.8, 2.0};
  const Field f = sample(g, [](double x, double y, double z) {
    return std::polar(std::exp(-(x * x + 2 * y * y + z * z) / 3), 0.4 * x - 0.3 * z);
  });
  const auto cov = covariant_gradient(f, p);
  double sum = 0.0;
  for (const auto& c : cov) sum += std::pow(l2_norm(c), 2);
  CHECK(inner(apply_magnetic_hamiltonian(f, p), f).real() == doctest::Approx(sum).epsilon(1e-11));
}

TEST_CASE("deterministic reductions do not depend on the thread count") {
  const Grid g({32, 32, 32}, {5.0, 5.0, 5.0});
  const Field f = sample(g, [](double x, double y, double z) {
    return complex(std::sin(x * y) * std::exp(-z * z / 4), std::cos(x + z));
  });
  const int saved = thread_count();
  std::vector<double> vals;
  for (int n : {1, 3, 8}) {
    set_thread_count(n);
    vals.push_back(mass(f) + gradient_sq(f) + rho_sq(f));
  }
  set_thread_count(saved);
  CHECK(vals[0] == vals[1]);
  CHECK(vals[0] == vals[2]);
}

TEST_CASE("field arithmetic and shape checks") {
  const Grid g({8, 8, 8}, {1.0, 1.0, 1.0});
  Field a(g), b(g);
  a[3] = {1.0, 2.0};
  b[3] = {0.5, -1.0};
  CHECK((a + b)[3] == complex(1.5, 1.0));
  CHECK((a - b)[3] == complex(0.5, 3.0));
  CHECK((complex(0, 1) * a)[3] == complex(-2.0, 1.0));
  CHECK(inner(a, a).real() == doctest::Approx(5.0 * g.cell_volume()));
  CHECK_THROWS_AS(Field(g, std::vector<complex>(3)), InvalidArgument);
  a[0] = {std::nan(""), 0.0};
  CHECK_FALSE(a.all_finite());
}
