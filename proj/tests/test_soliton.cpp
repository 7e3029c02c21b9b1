#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <filesystem>
#include <cmath>
#include <numbers>

#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/soliton.hpp"
#include "q_oracle.hpp"
#include "test_support.hpp"

using namespace magnls;
using magnls::test::rel;

TEST_CASE("Pohozaev identities and an independent spectral solver") {
  for (double a : {4.0 / 3.0, 2.0, 3.0}) {
    CAPTURE(a);
    const auto t0 = std::chrono::steady_clock::now();
    const RadialProfile q = solve_q(a, 1e-10);
    const QConstants qc = q_constants(q);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 5.0);
    CHECK(qc.pohozaev_residual_grad < 1e-8);
    CHECK(qc.pohozaev_residual_lp < 1e-8);
    const auto s = magnls::test::spectral_q(a);
    CHECK(rel(qc.mass_Q, s.mass) < 1e-6);
    CHECK(rel(qc.grad_Q_sq, s.grad_sq) < 1e-6);
    CHECK(rel(q.value(s.r0), s.q0) < 1e-6);
  }
}

TEST_CASE("profile mass by adaptive quadrature of the interpolant") {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::gauss_kronrod;
  const RadialProfile q = solve_q(2.0, 1e-10);
  auto dens = [&](double r) { return 4 * std::numbers::pi * r * r * q.value(r) * q.value(r); };
  const double inner = gauss_kronrod<double, 31>::integrate(dens, 0.0, q.r_max(), 20, 1e-13);
  exp_sinh<double> tail;
  const double outer = tail.integrate([&](double s) { return dens(q.r_max() + s); });
  CHECK(rel(inner + outer, q_constants(q).mass_Q) < 1e-8);
}

TEST_CASE("profile shape") {
  const RadialProfile q = solve_q(2.0, 1e-10);
  CHECK(q.value(0.0) > 0.0);
  CHECK(q.max_ode_residual < 1e-6);
  for (double r = 0.05; r < 12.0; r += 0.5) CHECK(q.derivative(r) < 0.0);
  CHECK(q.tail_rate == doctest::Approx(1.0).epsilon(1e-3));
  // The tail continues the interpolant continuously.
  const double rm = q.r_max();
  CHECK(rel(q.value(rm * (1 - 1e-9)), q.value(rm * (1 + 1e-9))) < 1e-6);
}

TEST_CASE("sharp constants") {
  const QConstants qc = q_constants(solve_q(2.0, 1e-10));
  CHECK(qc.sigma_c == doctest::Approx(1.0));
  CHECK(rel(qc.e0_mq, qc.e0_mq_direct) < 1e-8);
  CHECK(rel(qc.c_opt, qc.c_opt_direct) < 1e-8);
  // E0(Q) M(Q) = (1/6) ||grad Q||^2 ||Q||^2 when sigma_c = 1.
  CHECK(rel(qc.e0_mq, qc.grad_Q_sq * qc.mass_Q / 6.0) < 1e-8);
  const QConstants qm = q_constants(solve_q(4.0 / 3.0, 1e-10));
  CHECK(qm.mass_critical());
  CHECK(std::isnan(qm.e0_mq));
  CHECK(rel(qm.mass_Q, qm.grad_Q_sq * 2.0 / 3.0) < 1e-8);
}

TEST_CASE("profile JSON round trip and cache") {
  const RadialProfile q = solve_q(3.0, 1e-10);
  const RadialProfile r = profile_from_json(profile_to_json(q, q_constants(q)));
  CHECK(r.r_nodes == q.r_nodes);
  CHECK(r.q_values == q.q_values);
  CHECK(r.tail_amp == q.tail_amp);
  const auto dir = std::filesystem::temp_directory_path() / "magnls_q_cache_test";
  std::filesystem::remove_all(dir);
  const RadialProfile a = load_or_solve_q(dir.string(), 3.0, 1e-10);
  const RadialProfile b = load_or_solve_q(dir.string(), 3.0, 1e-10);
  CHECK(a.q_values == b.q_values);
  std::filesystem::remove_all(dir);
}

TEST_CASE("solver preconditions") {
  CHECK_THROWS_AS(solve_q(0.0, 1e-10), InvalidArgument);
  CHECK_THROWS_AS(solve_q(4.0, 1e-10), InvalidArgument);
  CHECK_THROWS_AS(solve_q(2.0, 0.0), InvalidArgument);
}

TEST_CASE("sampled soliton reproduces the radial norms") {
  const RadialProfile q = solve_q(2.0, 1e-10);
  const QConstants qc = q_constants(q);
  const Grid g({128, 128, 128}, {10.0, 10.0, 10.0});
  const Field f = scaled_soliton(q, g, {1.0, 1.0, {0, 0, 0}});
  CHECK(rel(mass(f), qc.mass_Q) < 1e-6);
  CHECK(rel(gradient_sq(f), qc.grad_Q_sq) < 1e-6);
  CHECK(rel(rho_sq(f), qc.rho_Q_sq) < 1e-6);
  CHECK(rel(lp_norm(f, 2.0), qc.lp_Q) < 1e-6);
}

TEST_CASE("scaled soliton norms follow the dilation laws") {
  // a lambda^{3/2} Q(lambda x): mass a^2 M(Q), gradient a^2 lambda^2 ||grad Q||^2,
  // L^{alpha+2} norm a^{alpha+2} lambda^{3 alpha/2} ||Q||^{alpha+2}.
  const RadialProfile q = solve_q(4.0 / 3.0, 1e-10);
  const QConstants qc = q_constants(q);
  const Grid g({96, 96, 96}, {10.0, 10.0, 10.0});
  const Field s = scaled_soliton(q, g, {0.8, 1.5, {0.5, 0, -0.5}});
  CHECK(rel(mass(s), 0.64 * qc.mass_Q) < 1e-6);
  CHECK(rel(gradient_sq(s), 0.64 * 2.25 * qc.grad_Q_sq) < 1e-6);
  CHECK(rel(lp_norm(s, 4.0 / 3.0), std::pow(0.8, 10.0 / 3.0) * std::pow(1.5, 2.0) * qc.lp_Q) < 1e-6);
  CHECK_THROWS_AS(scaled_soliton(q, Grid({32, 32, 32}, {10.0, 10.0, 10.0}), {1.0, 1.5, {0, 0, 0}}),
                  InvalidArgument);
}
