#include "magnls/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"

namespace magnls {

void require_resolution(const Grid& g, double width, const std::string& what, int axis) {
  const double h = axis >= 0 ? g.spacing(axis) : std::max({g.spacing(0), g.spacing(1), g.spacing(2)});
  if (!(width >= 8.0 * h))
    throw InvalidArgument(what + ": grid too coarse (need 8 points across width " +
                          std::to_string(width) + ", spacing is " + std::to_string(h) + ")");
}

Field scaled_soliton(const RadialProfile& q, const Grid& g, const ScaledSolitonSpec& s) {
  if (!(s.lambda > 0.0)) throw InvalidArgument("scaled-soliton: lambda must be positive");
  // The soliton core spans about 4 decay lengths, |x| <= 2/lambda.
  require_resolution(g, 4.0 / s.lambda, "scaled-soliton");
  return sample_radial(q, g, s.a, s.lambda, s.center);
}

Field transverse_bump(const Grid& g, const Params& p, const TransverseBumpSpec& s) {
  p.validate();
  if (!(s.lambda > 0.0)) throw InvalidArgument("transverse-gaussian-bump: lambda must be positive");
  if (!(s.c > 0.0)) throw InvalidArgument("transverse-gaussian-bump: c must be positive");
  const double ab = std::abs(p.b);
  require_resolution(g, 4.0 * std::sqrt(2.0 / ab), "transverse-gaussian-bump (transverse)", 0);
  require_resolution(g, 4.0 * std::sqrt(2.0 / ab), "transverse-gaussian-bump (transverse)", 1);
  require_resolution(g, 4.0 / s.lambda, "transverse-gaussian-bump (axial)", 2);
  Field f(g);
  const double gn = std::sqrt(ab / (2.0 * std::numbers::pi));
  const double hn = std::sqrt(s.c * s.lambda) * std::pow(std::numbers::pi, -0.25);
  for (int i = 0; i < g.n(0); ++i)
    for (int j = 0; j < g.n(1); ++j)
      for (int k = 0; k < g.n(2); ++k) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = s.lambda * g.coord(2, k);
        f[g.index(i, j, k)] = gn * std::exp(-0.25 * ab * (x * x + y * y)) * hn * std::exp(-0.5 * z * z);
      }
  return f;
}

double landau_gaussian_lp(const Params& p) {
  const double ab = std::abs(p.b), a = p.alpha;
  return std::pow(ab / (2.0 * std::numbers::pi), 0.5 * (a + 2.0)) * 4.0 * std::numbers::pi / ((a + 2.0) * ab);
}

double bump_profile_lp(double c, double alpha) {
  return std::pow(c, 0.5 * (alpha + 2.0)) * std::pow(std::numbers::pi, -0.25 * (alpha + 2.0)) *
         std::sqrt(2.0 * std::numbers::pi / (alpha + 2.0));
}

double bump_profile_grad_sq(double c) { return 0.5 * c; }

Field gaussian(const Grid& g, const GaussianSpec& s) {
  for (double w : s.widths)
    if (!(w > 0.0)) throw InvalidArgument("gaussian: widths must be positive");
  for (int j = 0; j < 3; ++j) require_resolution(g, 4.0 * s.widths[j], "gaussian", j);
  // The chirp adds local wavenumber 2 mu |x|; keep it below 2/3 of the grid
  // cutoff out to three widths.
  const double wmax = *std::max_element(s.widths.begin(), s.widths.end());
  for (int j = 0; j < 3; ++j) {
    const double kcut = 2.0 / 3.0 * std::numbers::pi / g.spacing(j);
    if (2.0 * std::abs(s.chirp) * 3.0 * wmax > kcut)
      throw InvalidArgument("gaussian: chirp too strong for the grid");
  }
  Field f(g);
  for (int i = 0; i < g.n(0); ++i)
    for (int j = 0; j < g.n(1); ++j)
      for (int k = 0; k < g.n(2); ++k) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
        const double dx = (x - s.center[0]) / s.widths[0], dy = (y - s.center[1]) / s.widths[1],
                     dz = (z - s.center[2]) / s.widths[2];
        const double env = s.amplitude * std::exp(-0.5 * (dx * dx + dy * dy + dz * dz));
        f[g.index(i, j, k)] = std::polar(env, -s.chirp * (x * x + y * y + z * z));
      }
  return f;
}

double smooth_cutoff(double r, double r_inner, double r_outer) {
  if (r <= r_inner) return 1.0;
  if (r >= r_outer) return 0.0;
  const double t = (r - r_inner) / (r_outer - r_inner);
  auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  return psi(1.0 - t) / (psi(1.0 - t) + psi(t));
}

Field cutoff_soliton(const RadialProfile& q, const Grid& g, const CutoffSolitonSpec& s, double* b_lambda) {
  if (!(s.lambda > 0.0)) throw InvalidArgument("cutoff-soliton: lambda must be positive");
  if (!(s.c > 0.0)) throw InvalidArgument("cutoff-soliton: c must be positive");
  const double lmin = std::min({g.half_width(0), g.half_width(1), g.half_width(2)});
  const double r1 = s.r_inner > 0.0 ? s.r_inner : 0.3 * lmin;
  const double r2 = s.r_outer > 0.0 ? s.r_outer : 0.6 * lmin;
  if (!(r2 > r1)) throw InvalidArgument("cutoff-soliton: r_outer must exceed r_inner");
  require_resolution(g, 4.0 / s.lambda, "cutoff-soliton");
  Field f(g);
  double mq = 0.0;
  {
    const QConstants qc = q_constants(q);
    mq = qc.mass_Q;
  }
  const double pre = std::pow(s.lambda, 1.5) / std::sqrt(mq);
  for (int i = 0; i < g.n(0); ++i)
    for (int j = 0; j < g.n(1); ++j)
      for (int k = 0; k < g.n(2); ++k) {
        const double x = g.coord(0, i), y = g.coord(1, j), z = g.coord(2, k);
        const double r = std::sqrt(x * x + y * y + z * z);
        f[g.index(i, j, k)] = pre * smooth_cutoff(r, r1, r2) * q.value(s.lambda * r);
      }
  const double m = mass(f);
  if (!(m > 0.0)) throw NumericalFailure("cutoff-soliton: zero mass before normalization");
  const double B = std::sqrt(s.c / m);
  f *= B;
  if (b_lambda) *b_lambda = B;
  return f;
}

}  // namespace magnls
