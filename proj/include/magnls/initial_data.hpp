#pragma once

#include <array>
#include <string>

#include "magnls/grid.hpp"
#include "magnls/soliton.hpp"

namespace magnls {

/// a * lambda^{3/2} Q(lambda |x - center|).
struct ScaledSolitonSpec {
  double a = 1.0;
  double lambda = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// g(x_perp) h_lambda(x3) with g the normalized lowest Landau level
/// Gaussian sqrt(|b|/2pi) exp(-|b| rho^2/4) and h_lambda(s) =
/// lambda^{1/2} h(lambda s), h(s) = sqrt(c) pi^{-1/4} exp(-s^2/2).
struct TransverseBumpSpec {
  double c = 1.0;
  double lambda = 1.0;
};

/// amplitude * exp(-sum (x_j - c_j)^2 / (2 w_j^2)) * exp(-i mu |x|^2).
struct GaussianSpec {
  double amplitude = 1.0;
  std::array<double, 3> widths{1.0, 1.0, 1.0};
  double chirp = 0.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// B_lambda lambda^{3/2} phi(x) Q0(lambda x) with Q0 = Q/||Q||, phi a smooth
/// radial cutoff equal to 1 for |x| <= r_inner and 0 beyond r_outer, and
/// B_lambda fixing the mass to c.
struct CutoffSolitonSpec {
  double c = 1.0;
  double lambda = 1.0;
  double r_inner = 0.0;  ///< 0 selects 0.3 * min L_j
  double r_outer = 0.0;  ///< 0 selects 0.6 * min L_j
};

Field scaled_soliton(const RadialProfile& q, const Grid& g, const ScaledSolitonSpec& s);
Field transverse_bump(const Grid& g, const Params& p, const TransverseBumpSpec& s);
Field gaussian(const Grid& g, const GaussianSpec& s);
Field cutoff_soliton(const RadialProfile& q, const Grid& g, const CutoffSolitonSpec& s,
                     double* b_lambda = nullptr);

/// Closed forms for the transverse bump: ||g||_{L^{alpha+2}(R^2)}^{alpha+2}
/// and ||h||_{L^{alpha+2}(R)}^{alpha+2}.
double landau_gaussian_lp(const Params& p);
double bump_profile_lp(double c, double alpha);
/// ||h'||^2 for the unscaled 1D profile.
double bump_profile_grad_sq(double c);

/// Smooth radial cutoff used by cutoff_soliton.
double smooth_cutoff(double r, double r_inner, double r_outer);

/// Throws InvalidArgument if the grid puts fewer than 8 points across a
/// feature of the given width along `axis` (every axis when axis < 0).
void require_resolution(const Grid& g, double width, const std::string& what, int axis = -1);

}  // namespace magnls
