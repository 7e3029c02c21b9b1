#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "magnls/checkpoint.hpp"
#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/ground_states.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/scenario.hpp"
#include "test_support.hpp"

using namespace magnls;
using magnls::test::max_abs;
using magnls::test::max_abs_diff;
using magnls::test::rel;
using magnls::test::sample;

TEST_CASE("dilation matches the closed form for Gaussians") {
  const Grid g({64, 64, 64}, {10.0, 10.0, 10.0});
  const GaussianSpec s{1.1, {1.2, 1.0, 1.4}, 0.0, {0, 0, 0}};
  const Field f = gaussian(g, s);
  for (double lam : {0.8, 0.95, 1.0, 1.05, 1.3}) {
    CAPTURE(lam);
    GaussianSpec d = s;
    d.amplitude = s.amplitude * std::pow(lam, 1.5);
    for (auto& w : d.widths) w /= lam;
    const Field exact = gaussian(g, d);
    CHECK(max_abs_diff(dilate(f, lam), exact) / max_abs(exact) < 1e-9);
  }
}

TEST_CASE("action gradient is the derivative of the action") {
  const Grid g({32, 32, 32}, {8.0, 8.0, 8.0});
  const Params p{0.9, 2.0};
  const double omega = 0.4;
  SampleRng r1(5, 0), r2(5, 1);
  const Field f = random_field(g, r1);
  const Field v = random_field(g, r2);
  const Field grad = action_gradient(f, p, omega);
  const double analytic = inner(grad, v).real();
  const double eps = 1e-4;
  const double fd = (action_S(f + complex(eps, 0) * v, p, omega) - action_S(f - complex(eps, 0) * v, p, omega)) / (2 * eps);
  CHECK(rel(fd, analytic) < 1e-7);
  const double fdi = (action_S(f + complex(0, eps) * v, p, omega) - action_S(f - complex(0, eps) * v, p, omega)) / (2 * eps);
  CHECK(rel(fdi, inner(grad, complex(0, 1) * v).real()) < 1e-7);
}

TEST_CASE("scaling curve matches direct evaluation of dilated fields") {
  const Grid g({48, 48, 48}, {8.0, 8.0, 8.0});
  const Params p{1.0, 2.0};
  const double omega = 0.2;
  const Field f = gaussian(g, {1.3, {1.3, 1.2, 1.5}, 0.0, {0, 0, 0}});
  const std::vector<double> lams{0.9, 1.0, 1.2};
  const auto curve = scaling_curve(f, p, omega, lams);
  for (const auto& pt : curve) {
    CAPTURE(pt.lambda);
    const Field d = dilate(f, pt.lambda);
    CHECK(rel(pt.S, action_S(d, p, omega)) < 1e-9);
    CHECK(rel(pt.K, nehari_K(d, p, omega)) < 1e-9);
    CHECK(rel(pt.H, pohozaev_H(d, p)) < 1e-9);
    CHECK(rel(pt.H, pt.lambda * pt.dS) < 1e-12);
    const double h = 1e-4;
    const auto nb = scaling_curve(f, p, omega, {pt.lambda - h, pt.lambda + h});
    CHECK(rel((nb[1].S - nb[0].S) / (2 * h), pt.dS) < 1e-6);
    CHECK(rel((nb[1].dS - nb[0].dS) / (2 * h), pt.d2S) < 1e-6);
  }
}

TEST_CASE("transverse bump closed forms") {
  const Params p{1.0, 2.0};
  const double c = 1.5;
  const Grid g({32, 32, 128}, {8.0, 8.0, 16.0});
  const double lpg = landau_gaussian_lp(p), lph = bump_profile_lp(c, p.alpha);
  // Landau level: ||g||^2 = 1, and (grad + iA) g has squared norm |b|.
  for (double lam : {0.5, 1.0, 2.0}) {
    CAPTURE(lam);
    const Field f = transverse_bump(g, p, {c, lam});
    CHECK(rel(mass(f), c) < 1e-10);
    CHECK(rel(lp_norm(f, p.alpha), std::pow(lam, p.alpha / 2) * lpg * lph) < 1e-8);
    const double E = std::abs(p.b) * c / 2 + lam * lam / 2 * bump_profile_grad_sq(c) -
                     std::pow(lam, p.alpha / 2) / (p.alpha + 2) * lpg * lph;
    CHECK(rel(energy_E(f, p), E) < 1e-9);
    CHECK(rel(magnetic_kinetic(f, p), std::abs(p.b) * c + lam * lam * bump_profile_grad_sq(c)) < 1e-9);
  }
  CHECK(bump_profile_grad_sq(c) == doctest::Approx(c / 2));
  CHECK_THROWS_AS(transverse_bump(Grid({16, 16, 128}, {8.0, 8.0, 16.0}), p, {c, 1.0}), InvalidArgument);
}

TEST_CASE("minimization preconditions") {
  const Grid g({32, 32, 32}, {7.0, 7.0, 7.0});
  CHECK_THROWS_AS(minimize_I_c(1.0, {1.0, 2.0}, g, 1e-6), PreconditionRefused);
  CHECK_THROWS_AS(minimize_I_c(1.0, {1.0, 4.0 / 3.0}, g, 1e-6), InvalidArgument);
  const QConstants qc = q_constants(solve_q(4.0 / 3.0, 1e-10));
  CHECK_THROWS_AS(minimize_I_c(1.01 * qc.mass_Q, {1.0, 4.0 / 3.0}, g, 1e-6, &qc), PreconditionRefused);
  CHECK_THROWS_AS(minimize_Im_c(5.0, 5.0, {1.0, 2.0}, g, 1e-6), PreconditionRefused);
  CHECK_THROWS_AS(minimize_action(-1.0, {1.0, 2.0}, g, 1e-6), PreconditionRefused);
  CHECK_THROWS_AS(minimize_action(-2.0, {-1.5, 2.0}, g, 1e-6), PreconditionRefused);
}

TEST_CASE("decay rate fit on a known exponential profile") {
  const Grid g({16, 16, 256}, {4.0, 4.0, 40.0});
  const double delta = 0.6;
  const Field f = sample(g, [&](double x, double y, double z) {
    return complex(std::exp(-(x * x + y * y) / 2 - delta * std::sqrt(1 + z * z)), 0.0);
  });
  CHECK(fit_decay_rate(f) == doctest::Approx(delta).epsilon(0.02));
}

TEST_CASE("omega bound fit") {
  const Params p{2.0, 2.0};
  const Grid g({8, 8, 8}, {1.0, 1.0, 1.0});
  std::vector<GroundStateResult> states;
  for (auto [c, m, w] : {std::tuple{1.0, 16.0, -1.5}, std::tuple{0.5, 16.0, -1.8}}) {
    GroundStateResult r{Field(g)};
    r.c = c;
    r.m = m;
    r.omega = w;
    states.push_back(r);
  }
  // (1 + omega/|b|) / (c^{1/2} m^{1/2}) for alpha = 2.
  CHECK(fit_omega_bound(states, p) == doctest::Approx(std::max(0.25 / 4.0, 0.1 / std::sqrt(8.0))));
}

TEST_CASE("action ground state on a small grid") {
  const Params p{1.0, 2.0};
  const Grid g({64, 64, 64}, {5.0, 5.0, 6.0});
  const GroundStateResult gs = minimize_action(0.5, p, g, 1e-7);
  CHECK(gs.kind == "action");
  CHECK(gs.residual_el < 1e-5);
  CHECK(std::abs(gs.k_omega) < 1e-8 * gs.grad_sq);
  CHECK(std::abs(gs.h_value) < 1e-4 * gs.grad_sq);
  CHECK(gs.decay_delta > 0.0);
  CHECK(rel(gs.objective, action_S(gs.phi, p, 0.5)) < 1e-12);
  // On the Nehari set S = (alpha/(2(alpha+2))) ||phi||^{alpha+2}.
  CHECK(rel(gs.objective, lp_norm(gs.phi, 2.0) / 4) < 1e-6);
  const auto dir = std::filesystem::temp_directory_path() / "magnls_gs_test";
  std::filesystem::remove_all(dir);
  write_ground_state(dir.string(), "gs", gs, p);
  CHECK(read_checkpoint((dir / "gs.mnls").string()).field.values() == gs.phi.values());
  CHECK(std::filesystem::exists(dir / "gs.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("constrained minimizer returns the Lagrange multiplier") {
  const Params p{4.0, 2.0};
  const double c = 6.0;
  const Grid g({24, 24, 64}, {3.0, 3.0, 16.0});
  const GroundStateResult gs = minimize_Im_c(c, 80.0, p, g, 1e-6);
  CHECK(gs.kind == "Im_c");
  CHECK(rel(gs.mass, c) < 1e-10);
  CHECK_FALSE(gs.boundary_trapped);
  CHECK(gs.omega > -std::abs(p.b));
  CHECK(gs.omega < 0.0);
  const double rayleigh = (lp_norm(gs.phi, 2.0) - magnetic_kinetic(gs.phi, p)) / mass(gs.phi);
  CHECK(gs.omega == doctest::Approx(rayleigh).epsilon(1e-9));
  CHECK(gs.objective < std::abs(p.b) * c / 2);
  // Axial decay exp(-sqrt(omega + |b|) |x3|) of the bound state.
  CHECK(gs.decay_delta == doctest::Approx(std::sqrt(gs.omega + std::abs(p.b))).epsilon(0.1));
}

TEST_CASE("instability experiment requires an action ground state") {
  const Grid g({8, 8, 8}, {1.0, 1.0, 1.0});
  GroundStateResult r{Field(g)};
  r.kind = "I_c";
  CHECK_THROWS_AS(instability_experiment(r, {1.0, 2.0}, 1.05, {}), InvalidArgument);
}
