#pragma once

#include <array>
#include <string>

#include "magnls/grid.hpp"

namespace magnls {

double mass(const Field& f);

struct AngularMomentum {
  double value = 0.0;     ///< real part of i * int (x2 d1 f - x1 d2 f) conj(f)
  double imag_residual = 0.0;
};
AngularMomentum angular_momentum_parts(const Field& f);
/// Real part of R(f); throws NumericalFailure when the imaginary residual
/// exceeds 1e-6 * mass.
double angular_momentum(const Field& f);

struct MagneticKinetic {
  double total = 0.0;     ///< ||(grad + iA) f||^2 from the covariant gradient
  double grad_sq = 0.0;   ///< ||grad f||^2
  double b_R = 0.0;       ///< b R(f)
  double rho_term = 0.0;  ///< (b^2/4) ||rho f||^2
  double residual() const;
};
MagneticKinetic magnetic_kinetic_parts(const Field& f, const Params& p);
double magnetic_kinetic(const Field& f, const Params& p);

double gradient_sq(const Field& f);
/// ||rho f||^2 with rho^2 = x1^2 + x2^2.
double rho_sq(const Field& f);
/// ||f||_{L^{alpha+2}}^{alpha+2}; points with f = 0 contribute exactly 0.
double lp_norm(const Field& f, double alpha);

double energy_E(const Field& f, const Params& p);
double energy_E0(const Field& f, const Params& p);
double energy_free(const Field& f, const Params& p);

/// F = int |x|^2 |f|^2.
double virial_F(const Field& f);
/// F' = 4 Im int (x . grad f) conj(f).
double virial_Fprime(const Field& f);
double virial_Fsecond(const Field& f, const Params& p);
/// Im int (x . grad f) conj(f).
double virial_momentum(const Field& f);

double pohozaev_H(const Field& f, const Params& p);
double nehari_K(const Field& f, const Params& p, double omega);
double action_S(const Field& f, const Params& p, double omega);
/// ||(grad + iA) f||^2 + omega ||f||^2.
double quadratic_H_omega(const Field& f, const Params& p, double omega);
/// Factor t with K_omega(t f) = 0.
double nehari_scale(const Field& f, const Params& p, double omega);

double g_threshold(double lambda, double c_opt, const Params& p);
/// RHS - LHS of the Cauchy-Schwarz virial inequality.
double cs_virial_gap(const Field& f, double c_opt, const Params& p);

/// Mass fraction in the outer shell of the box, max_j |x_j|/L_j > 0.8.
double boundary_mass_fraction(const Field& f);

/// Every quadratic and nonlinear integral at once, sharing one gradient.
struct Integrals {
  double mass = 0.0;
  double grad_sq = 0.0;
  double magkin = 0.0;
  double R = 0.0;
  double R_imag = 0.0;
  double rho_sq = 0.0;
  double x_sq = 0.0;
  double lp = 0.0;
  double x_dot_grad_im = 0.0;
  double boundary_mass = 0.0;
};
Integrals compute_integrals(const Field& f, const Params& p);

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy_E = 0.0;
  double energy_E0 = 0.0;
  double angular_R = 0.0;
  double grad_norm_sq = 0.0;
  double mag_kinetic_sq = 0.0;
  double rho_norm_sq = 0.0;
  double lp_norm = 0.0;
  double virial_F = 0.0;
  double virial_Fprime = 0.0;
  double boundary_mass_fraction = 0.0;
};

DiagnosticsRecord diagnostics(const Field& f, const Params& p, double t);
DiagnosticsRecord diagnostics_from(const Integrals& in, const Params& p, double t);
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

}  // namespace magnls
