#include "magnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "magnls/errors.hpp"
#include "magnls/parallel.hpp"
#include "magnls/spectral.hpp"

namespace magnls {

namespace {

double pow_abs2(double a2, double alpha) { return a2 > 0.0 ? std::pow(a2, 0.5 * alpha + 1.0) : 0.0; }

}  // namespace

Integrals compute_integrals(const Field& f, const Params& p) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto grad = gradient(f);
  const auto x0 = g.coords(0), x1 = g.coords(1), x2 = g.coords(2);
  const double L0 = g.half_width(0), L1 = g.half_width(1), L2 = g.half_width(2);
  const double hb = 0.5 * p.b;
  const auto s = reduce_sums<10>(f.size(), [&](std::size_t i, double* v) {
    const auto ix = g.unravel(i);
    const double a = x0[ix[0]], b = x1[ix[1]], c = x2[ix[2]];
    const complex u = f[i], d0 = grad[0][i], d1 = grad[1][i], d2 = grad[2][i];
    const double m = std::norm(u);
    const complex c0 = d0 + complex(0.0, -hb * b) * u, c1 = d1 + complex(0.0, hb * a) * u;
    const complex lz = complex(0.0, 1.0) * (b * d0 - a * d1);
    const complex rz = lz * std::conj(u);
    const complex xg = (a * d0 + b * d1 + c * d2) * std::conj(u);
    v[0] = m;
    v[1] = std::norm(d0) + std::norm(d1) + std::norm(d2);
    v[2] = std::norm(c0) + std::norm(c1) + std::norm(d2);
    v[3] = rz.real();
    v[4] = rz.imag();
    v[5] = (a * a + b * b) * m;
    v[6] = (a * a + b * b + c * c) * m;
    v[7] = pow_abs2(m, p.alpha);
    v[8] = xg.imag();
    const double edge = std::max({std::abs(a) / L0, std::abs(b) / L1, std::abs(c) / L2});
    v[9] = edge > 0.8 ? m : 0.0;
  });
  const double dv = g.cell_volume();
  Integrals out;
  out.mass = s[0] * dv;
  out.grad_sq = s[1] * dv;
  out.magkin = s[2] * dv;
  out.R = s[3] * dv;
  out.R_imag = s[4] * dv;
  out.rho_sq = s[5] * dv;
  out.x_sq = s[6] * dv;
  out.lp = s[7] * dv;
  out.x_dot_grad_im = s[8] * dv;
  out.boundary_mass = s[9] * dv;
  return out;
}

double mass(const Field& f) {
  f.check_shape();
  return reduce_sum(f.size(), [&](std::size_t i) { return std::norm(f[i]); }) *
         f.grid().cell_volume();
}

AngularMomentum angular_momentum_parts(const Field& f) {
  const complex r = inner(apply_Lz(f), f);
  return {r.real(), r.imag()};
}

double angular_momentum(const Field& f) {
  const auto r = angular_momentum_parts(f);
  if (std::abs(r.imag_residual) > 1e-6 * mass(f))
    throw NumericalFailure("angular_momentum: imaginary residual exceeds 1e-6 * mass");
  return r.value;
}

double MagneticKinetic::residual() const {
  const double sum = grad_sq + b_R + rho_term;
  const double scale = std::max({std::abs(total), grad_sq, rho_term, 1e-300});
  return std::abs(total - sum) / scale;
}

MagneticKinetic magnetic_kinetic_parts(const Field& f, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  MagneticKinetic mk;
  mk.total = in.magkin;
  mk.grad_sq = in.grad_sq;
  mk.b_R = p.b * in.R;
  mk.rho_term = 0.25 * p.b * p.b * in.rho_sq;
  return mk;
}

double magnetic_kinetic(const Field& f, const Params& p) {
  const auto mk = magnetic_kinetic_parts(f, p);
  if (mk.residual() > 1e-8)
    throw NumericalFailure("magnetic_kinetic: decomposition residual exceeds 1e-8");
  return mk.total;
}

double gradient_sq(const Field& f) {
  const auto grad = gradient(f);
  return reduce_sum(f.size(), [&](std::size_t i) {
           return std::norm(grad[0][i]) + std::norm(grad[1][i]) + std::norm(grad[2][i]);
         }) *
         f.grid().cell_volume();
}

double rho_sq(const Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1);
  return reduce_sum(f.size(), [&](std::size_t i) {
           const auto ix = g.unravel(i);
           return (x0[ix[0]] * x0[ix[0]] + x1[ix[1]] * x1[ix[1]]) * std::norm(f[i]);
         }) *
         g.cell_volume();
}

double lp_norm(const Field& f, double alpha) {
  f.check_shape();
  return reduce_sum(f.size(), [&](std::size_t i) { return pow_abs2(std::norm(f[i]), alpha); }) *
         f.grid().cell_volume();
}

double energy_E(const Field& f, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  return 0.5 * in.magkin - in.lp / (p.alpha + 2.0);
}

double energy_E0(const Field& f, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  return 0.5 * in.grad_sq + p.b * p.b / 8.0 * in.rho_sq - in.lp / (p.alpha + 2.0);
}

double energy_free(const Field& f, const Params& p) {
  return 0.5 * gradient_sq(f) - lp_norm(f, p.alpha) / (p.alpha + 2.0);
}

double virial_F(const Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1), x2 = g.coords(2);
  return reduce_sum(f.size(), [&](std::size_t i) {
           const auto ix = g.unravel(i);
           const double r2 = x0[ix[0]] * x0[ix[0]] + x1[ix[1]] * x1[ix[1]] + x2[ix[2]] * x2[ix[2]];
           return r2 * std::norm(f[i]);
         }) *
         g.cell_volume();
}

double virial_momentum(const Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto grad = gradient(f);
  const auto x0 = g.coords(0), x1 = g.coords(1), x2 = g.coords(2);
  return reduce_sum(f.size(), [&](std::size_t i) {
           const auto ix = g.unravel(i);
           const complex xg = x0[ix[0]] * grad[0][i] + x1[ix[1]] * grad[1][i] + x2[ix[2]] * grad[2][i];
           return (xg * std::conj(f[i])).imag();
         }) *
         g.cell_volume();
}

double virial_Fprime(const Field& f) { return 4.0 * virial_momentum(f); }

double virial_Fsecond(const Field& f, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  return 8.0 * in.grad_sq - 2.0 * p.b * p.b * in.rho_sq -
         12.0 * p.alpha / (p.alpha + 2.0) * in.lp;
}

double pohozaev_H(const Field& f, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  return in.grad_sq - 0.25 * p.b * p.b * in.rho_sq -
         1.5 * p.alpha / (p.alpha + 2.0) * in.lp;
}

double quadratic_H_omega(const Field& f, const Params& p, double omega) {
  const Integrals in = compute_integrals(f, p);
  return in.magkin + omega * in.mass;
}

double nehari_K(const Field& f, const Params& p, double omega) {
  const Integrals in = compute_integrals(f, p);
  return in.magkin + omega * in.mass - in.lp;
}

double action_S(const Field& f, const Params& p, double omega) {
  const Integrals in = compute_integrals(f, p);
  return 0.5 * in.magkin - in.lp / (p.alpha + 2.0) + 0.5 * omega * in.mass;
}

double nehari_scale(const Field& f, const Params& p, double omega) {
  const Integrals in = compute_integrals(f, p);
  const double h = in.magkin + omega * in.mass;
  if (!(in.lp > 0.0) || !(h > 0.0))
    throw InvalidArgument("nehari_scale: requires f != 0 and positive quadratic part");
  return std::pow(h / in.lp, 1.0 / p.alpha);
}

double g_threshold(double lambda, double c_opt, const Params& p) {
  if (!(lambda >= 0.0)) throw InvalidArgument("g_threshold: lambda must be nonnegative");
  return 0.5 * lambda * lambda - c_opt * std::pow(lambda, 1.5 * p.alpha) / (p.alpha + 2.0);
}

double cs_virial_gap(const Field& f, double c_opt, const Params& p) {
  const Integrals in = compute_integrals(f, p);
  const double a = p.alpha;
  const double gn = in.lp > 0.0
                        ? std::pow(in.lp / (c_opt * std::pow(in.mass, (4.0 - a) / 4.0)), 4.0 / (3.0 * a))
                        : 0.0;
  return in.x_sq * (in.grad_sq - gn) - in.x_dot_grad_im * in.x_dot_grad_im;
}

double boundary_mass_fraction(const Field& f) {
  f.check_shape();
  const Grid& g = f.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1), x2 = g.coords(2);
  const double L0 = g.half_width(0), L1 = g.half_width(1), L2 = g.half_width(2);
  const auto s = reduce_sums<2>(f.size(), [&](std::size_t i, double* v) {
    const auto ix = g.unravel(i);
    const double edge = std::max({std::abs(x0[ix[0]]) / L0, std::abs(x1[ix[1]]) / L1,
                                  std::abs(x2[ix[2]]) / L2});
    const double m = std::norm(f[i]);
    v[0] = m;
    v[1] = edge > 0.8 ? m : 0.0;
  });
  return s[0] > 0.0 ? s[1] / s[0] : 0.0;
}

DiagnosticsRecord diagnostics_from(const Integrals& in, const Params& p, double t) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = in.mass;
  r.grad_norm_sq = in.grad_sq;
  r.mag_kinetic_sq = in.magkin;
  r.angular_R = in.R;
  r.rho_norm_sq = in.rho_sq;
  r.lp_norm = in.lp;
  r.energy_E = 0.5 * in.magkin - in.lp / (p.alpha + 2.0);
  r.energy_E0 = 0.5 * in.grad_sq + p.b * p.b / 8.0 * in.rho_sq - in.lp / (p.alpha + 2.0);
  r.virial_F = in.x_sq;
  r.virial_Fprime = 4.0 * in.x_dot_grad_im;
  r.boundary_mass_fraction = in.mass > 0.0 ? in.boundary_mass / in.mass : 0.0;
  return r;
}

DiagnosticsRecord diagnostics(const Field& f, const Params& p, double t) {
  return diagnostics_from(compute_integrals(f, p), p, t);
}

std::string diagnostics_csv_header() {
  return "t,mass,E,E0,R,grad2,magkin2,rho2,lp,F,Fprime,boundary_frac";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                r.t, r.mass, r.energy_E, r.energy_E0, r.angular_R, r.grad_norm_sq, r.mag_kinetic_sq,
                r.rho_norm_sq, r.lp_norm, r.virial_F, r.virial_Fprime, r.boundary_mass_fraction);
  return buf;
}

}  // namespace magnls
