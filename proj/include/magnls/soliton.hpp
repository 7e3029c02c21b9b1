#pragma once

#include <array>
#include <string>
#include <vector>

#include "magnls/grid.hpp"

namespace magnls {

/// Positive radial solution of -Q'' - (2/r) Q' + Q - Q^{alpha+1} = 0 on
/// uniform nodes, with the asymptotic tail A e^{-kappa r}/r beyond the last
/// node.
struct RadialProfile {
  double alpha = 0.0;
  double tol = 0.0;
  std::vector<double> r_nodes;
  std::vector<double> q_values;
  std::vector<double> dq_values;
  double tail_rate = 1.0;   ///< fitted kappa
  double tail_amp = 0.0;    ///< A in A e^{-kappa r}/r
  double shoot_radius = 0.0;  ///< radius up to which values come from shooting
  double max_ode_residual = 0.0;

  double r_max() const { return r_nodes.back(); }
  /// Q(r) by cubic Hermite interpolation, exponential tail beyond r_max.
  double value(double r) const;
  double derivative(double r) const;
};

/// Sharp constants derived from Q. For alpha = 4/3 sigma_c is +inf and the
/// threshold products are NaN.
struct QConstants {
  double alpha = 0.0;
  double mass_Q = 0.0;
  double grad_Q_sq = 0.0;
  double lp_Q = 0.0;        ///< ||Q||_{L^{alpha+2}}^{alpha+2}
  double rho_Q_sq = 0.0;    ///< ||rho Q||^2 = (2/3) ||x Q||^2
  double sigma_c = 0.0;
  double c_opt = 0.0;
  double e0_mq = 0.0;       ///< E^0(Q) M(Q)^{sigma_c}
  double grad_mass_product = 0.0;  ///< ||grad Q|| ||Q||^{sigma_c}
  double lp_mass_product = 0.0;    ///< ||Q||^{alpha+2} ||Q||^{2 sigma_c}
  // Same quantities computed without the Pohozaev closed forms.
  double e0_mq_direct = 0.0;
  double c_opt_direct = 0.0;
  double pohozaev_residual_grad = 0.0;
  double pohozaev_residual_lp = 0.0;

  bool mass_critical() const;
};

bool is_mass_critical(double alpha);

/// Shooting on Q(0) with bisection; adaptive Dormand-Prince integration.
RadialProfile solve_q(double alpha, double tol = 1e-10);

/// Radial quadrature of the norms entering every threshold.
QConstants q_constants(const RadialProfile& profile);

/// Samples amplitude * scale^{3/2} * Q(scale |x - center|).
Field sample_radial(const RadialProfile& profile, const Grid& grid, double amplitude, double scale,
                    std::array<double, 3> center = {0.0, 0.0, 0.0});

std::string profile_to_json(const RadialProfile& profile, const QConstants& qc);
RadialProfile profile_from_json(const std::string& text);

/// Reads the cached profile for (alpha, tol) from dir, or solves and writes it.
RadialProfile load_or_solve_q(const std::string& cache_dir, double alpha, double tol);

}  // namespace magnls
