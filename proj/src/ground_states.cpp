#include "magnls/ground_states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <json.hpp>

#include "magnls/checkpoint.hpp"
#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/parallel.hpp"
#include "magnls/spectral.hpp"

namespace magnls {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct State {
  explicit State(Field x) : f(std::move(x)), hf(f) {}
  Field f;
  Field hf;  ///< -(grad+iA)^2 f
  double magkin = 0.0;
  double mass = 0.0;
  double lp = 0.0;
};

double nonlinear_density(double m2, double alpha) {
  return m2 > 0.0 ? std::pow(m2, 0.5 * alpha + 1.0) : 0.0;
}

State evaluate(Field f, const Params& p) {
  State s(std::move(f));
  s.hf = apply_magnetic_hamiltonian(s.f, p);
  const double dv = s.f.grid().cell_volume();
  const auto sums = reduce_sums<3>(s.f.size(), [&](std::size_t i, double* v) {
    const double m2 = std::norm(s.f[i]);
    v[0] = (s.hf[i] * std::conj(s.f[i])).real();
    v[1] = m2;
    v[2] = nonlinear_density(m2, p.alpha);
  });
  s.magkin = sums[0] * dv;
  s.mass = sums[1] * dv;
  s.lp = sums[2] * dv;
  return s;
}

void scale(State& s, double t, double alpha) {
  s.f *= t;
  s.hf *= t;
  s.magkin *= t * t;
  s.mass *= t * t;
  s.lp *= std::pow(t, alpha + 2.0);
}

bool finite(const State& s) {
  return std::isfinite(s.magkin) && std::isfinite(s.mass) && std::isfinite(s.lp);
}

Field residual_field(const State& s, const Params& p, double omega) {
  Field g = s.hf;
  const double ha = 0.5 * p.alpha;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double m2 = std::norm(s.f[i]);
    const double w = m2 > 0.0 ? std::pow(m2, ha) : 0.0;
    g[i] += (omega - w) * s.f[i];
  }
  return g;
}

double re_inner(const Field& a, const Field& b) {
  const double dv = a.grid().cell_volume();
  return reduce_sum(a.size(), [&](std::size_t i) { return (a[i] * std::conj(b[i])).real(); }) * dv;
}

Field precondition(const Field& g, double shift) {
  Field out = g;
  spectral::forward(out);
  const Grid& gr = g.grid();
  const auto k0 = gr.wavenumbers(0), k1 = gr.wavenumbers(1), k2 = gr.wavenumbers(2);
  for (int i0 = 0; i0 < gr.n(0); ++i0)
    for (int i1 = 0; i1 < gr.n(1); ++i1)
      for (int i2 = 0; i2 < gr.n(2); ++i2)
        out[gr.index(i0, i1, i2)] /= k0[i0] * k0[i0] + k1[i1] * k1[i1] + k2[i2] * k2[i2] + shift;
  spectral::backward(out);
  return out;
}

struct Problem {
  std::function<double(const State&)> objective;
  std::function<double(const State&)> multiplier;
  /// Factor that maps a state onto the constraint set.
  std::function<double(const State&)> projection;
  std::function<bool(const State&)> admissible = [](const State&) { return true; };
  double shift = 1.0;
  bool check_resolution = false;
};

struct DescentOutcome {
  explicit DescentOutcome(State st) : s(std::move(st)) {}
  State s;
  double omega = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool stalled_at_cap = false;
};

DescentOutcome descend(Field f0, const Params& p, const Problem& pb, double tol, const DescentConfig& cfg) {
  State s = evaluate(std::move(f0), p);
  if (!(s.mass > 0.0)) throw InvalidArgument("descent: initial field is zero");
  scale(s, pb.projection(s), p.alpha);
  if (!pb.admissible(s)) throw InvalidArgument("descent: initial field violates the constraint");

  double omega = pb.multiplier(s);
  Field g = residual_field(s, p, omega);
  Field d = precondition(g, pb.shift);
  d *= -1.0;
  double J = pb.objective(s);
  double J_prev = std::numeric_limits<double>::infinity();
  double tau = cfg.step;
  std::vector<double> history{J};
  constexpr std::size_t kMemory = 8;

  DescentOutcome out(s);
  long it = 0;
  for (;; ++it) {
    const double res = std::sqrt(std::max(0.0, re_inner(g, g)) / s.mass);
    if (res < tol && std::abs(J - J_prev) <= tol * std::max(1.0, std::abs(J))) {
      out.residual = res;
      break;
    }
    if (it >= cfg.max_iterations) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "descent: no convergence after %ld iterations (residual %.3e)", it, res);
      throw NumericalFailure(buf);
    }
    if (pb.check_resolution && it % 50 == 0 && spectral_tail_fraction(s.f) > 1e-4)
      throw NumericalFailure(
          "descent: iterate concentrates below the grid scale (energy unbounded below?)");

    const double gd = re_inner(g, d);
    const double J_ref = *std::max_element(history.begin(), history.end());
    bool cap_hit = false;
    std::optional<State> accepted;
    while (tau > 1e-14) {
      Field trial = s.f;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += tau * d[i];
      State t = evaluate(std::move(trial), p);
      if (finite(t) && t.mass > 0.0 && t.lp > 0.0) {
        const double fac = pb.projection(t);
        if (std::isfinite(fac) && fac > 0.0) {
          scale(t, fac, p.alpha);
          if (!pb.admissible(t)) {
            cap_hit = true;
          } else if (pb.objective(t) <= J_ref + 1e-4 * tau * gd) {
            accepted.emplace(std::move(t));
            break;
          }
        }
      }
      tau *= 0.5;
    }
    if (!accepted) {
      if (cap_hit) {
        out.stalled_at_cap = true;
        out.residual = res;
        break;
      }
      // Objective flat to round-off: accept the current point if the
      // residual is already close.
      if (res < 10.0 * tol) {
        out.residual = res;
        break;
      }
      throw NumericalFailure("descent: line search stalled");
    }

    State next = std::move(*accepted);
    const double omega_next = pb.multiplier(next);
    Field g_next = residual_field(next, p, omega_next);
    Field d_next = precondition(g_next, pb.shift);
    d_next *= -1.0;

    // Barzilai-Borwein step in the preconditioned metric.
    const Field sv = next.f - s.f;
    const Field y = g_next - g;
    const Field py = d - d_next;
    const double sy = re_inner(sv, y), pyy = re_inner(py, y);
    tau = (sy > 0.0 && pyy > 0.0) ? std::clamp(sy / pyy, 1e-6, 1e3) : cfg.step;

    s = std::move(next);
    g = std::move(g_next);
    d = std::move(d_next);
    omega = omega_next;
    J_prev = J;
    J = pb.objective(s);
    history.push_back(J);
    if (history.size() > kMemory) history.erase(history.begin());
  }
  out.s = std::move(s);
  out.omega = omega;
  out.objective = J;
  out.iterations = it;
  return out;
}

double bump_energy(double lambda, double c, const Params& p) {
  return 0.5 * std::abs(p.b) * c + 0.5 * lambda * lambda * bump_profile_grad_sq(c) -
         std::pow(lambda, 0.5 * p.alpha) / (p.alpha + 2.0) * landau_gaussian_lp(p) *
             bump_profile_lp(c, p.alpha);
}

double bump_magkin(double lambda, double c, const Params& p) {
  return std::abs(p.b) * c + lambda * lambda * bump_profile_grad_sq(c);
}

double best_bump_lambda(double c, const Params& p, const Grid& g, double magkin_cap) {
  double best = std::numeric_limits<double>::quiet_NaN(), best_e = 0.0;
  for (int k = -24; k <= 12; ++k) {
    const double lam = std::pow(2.0, k / 4.0);
    if (4.0 / lam < 8.0 * g.spacing(2) || lam * g.half_width(2) < 6.0) continue;
    if (bump_magkin(lam, c, p) > magkin_cap) continue;
    const double e = bump_energy(lam, c, p);
    if (std::isnan(best) || e < best_e) {
      best = lam;
      best_e = e;
    }
  }
  if (std::isnan(best))
    throw InvalidArgument("ground state: the grid cannot hold any admissible transverse bump start");
  return best;
}

void finish(GroundStateResult& r, const DescentOutcome& o, const Params& p) {
  r.omega = o.omega;
  r.objective = o.objective;
  r.residual_el = o.residual;
  r.iterations = o.iterations;
  const Integrals in = compute_integrals(r.phi, p);
  r.grad_sq = in.grad_sq;
  r.magkin = in.magkin;
  r.mass = in.mass;
  r.k_omega = in.magkin + r.omega * in.mass - in.lp;
  r.h_value = in.grad_sq - 0.25 * p.b * p.b * in.rho_sq - 1.5 * p.alpha / (p.alpha + 2.0) * in.lp;
  r.decay_delta = fit_decay_rate(r.phi);
  r.scaling_second_deriv = scaling_curve(r.phi, p, r.omega, {1.0}).front().d2S;
}

double mass_projection(const State& s, double c) { return std::sqrt(c / s.mass); }

}  // namespace

Field action_gradient(const Field& f, const Params& p, double omega) {
  return residual_field(evaluate(f, p), p, omega);
}

GroundStateResult minimize_I_c(double c, const Params& p, const Grid& grid, double tol,
                               const QConstants* qc, DescentConfig cfg) {
  p.validate();
  if (!(c > 0.0)) throw InvalidArgument("minimize_I_c: c must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("minimize_I_c: tol must be positive");
  if (is_mass_critical(p.alpha)) {
    if (!qc) throw InvalidArgument("minimize_I_c: alpha = 4/3 needs the soliton constants");
    if (c >= qc->mass_Q) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "minimize_I_c: c = %.6g >= M(Q) = %.6g, the infimum is not attained", c, qc->mass_Q);
      throw PreconditionRefused(buf);
    }
  } else if (p.alpha > 4.0 / 3.0) {
    // E(sqrt(c) lambda^{3/2} G(lambda x)) for the unit Gaussian G.
    const double a = p.alpha;
    const double glp = std::pow(std::numbers::pi, -0.75 * (a + 2.0)) *
                       std::pow(2.0 * std::numbers::pi / (a + 2.0), 1.5);
    std::string msg = "minimize_I_c: alpha > 4/3, I(c) = -inf; scaling witness E(f^lambda):";
    for (double lam : {1.0, 4.0, 16.0, 64.0}) {
      const double e = 0.5 * (1.5 * c * lam * lam + 0.25 * p.b * p.b * c / (lam * lam)) -
                       std::pow(c, 0.5 * (a + 2.0)) * std::pow(lam, 1.5 * a) * glp / (a + 2.0);
      char buf[64];
      std::snprintf(buf, sizeof buf, " lambda=%g:%.6g", lam, e);
      msg += buf;
    }
    throw PreconditionRefused(msg);
  }
  const double lam = best_bump_lambda(c, p, grid, std::numeric_limits<double>::infinity());
  Field f0 = transverse_bump(grid, p, TransverseBumpSpec{c, lam});

  Problem pb;
  pb.objective = [&](const State& s) { return 0.5 * s.magkin - s.lp / (p.alpha + 2.0); };
  pb.multiplier = [](const State& s) { return (s.lp - s.magkin) / s.mass; };
  pb.projection = [c](const State& s) { return mass_projection(s, c); };
  pb.shift = cfg.precond_shift > 0.0 ? cfg.precond_shift : std::max(1.0, std::abs(p.b));
  pb.check_resolution = true;
  DescentOutcome o = descend(std::move(f0), p, pb, tol, cfg);

  GroundStateResult r(o.s.f);
  r.kind = "I_c";
  r.c = c;
  finish(r, o, p);
  return r;
}

GroundStateResult minimize_Im_c(double c, double m, const Params& p, const Grid& grid, double tol,
                                const std::optional<Field>& initial, DescentConfig cfg,
                                double magkin_floor) {
  p.validate();
  if (!(magkin_floor < m)) throw InvalidArgument("minimize_Im_c: magkin_floor must be below m");
  if (!(p.alpha > 4.0 / 3.0) || is_mass_critical(p.alpha))
    throw InvalidArgument("minimize_Im_c: requires 4/3 < alpha < 4");
  if (!(c > 0.0) || !(m > 0.0)) throw InvalidArgument("minimize_Im_c: c and m must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("minimize_Im_c: tol must be positive");
  if (std::abs(p.b) * c >= m)
    throw PreconditionRefused("minimize_Im_c: S(c) does not meet D(m) since ||(grad+iA)f||^2 >= |b| c");

  auto start = [&] {
    // Prefer a start inside D(m/4), fall back to D(m/2).
    double lam = 0.0;
    try {
      lam = best_bump_lambda(c, p, grid, 0.25 * m);
    } catch (const InvalidArgument&) {
      lam = best_bump_lambda(c, p, grid, 0.5 * m);
    }
    return transverse_bump(grid, p, TransverseBumpSpec{c, lam});
  };
  Field f0 = initial ? *initial : start();
  if (!(f0.grid() == grid)) throw InvalidArgument("minimize_Im_c: initial field is on a different grid");

  Problem pb;
  pb.objective = [&](const State& s) { return 0.5 * s.magkin - s.lp / (p.alpha + 2.0); };
  pb.multiplier = [](const State& s) { return (s.lp - s.magkin) / s.mass; };
  pb.projection = [c](const State& s) { return mass_projection(s, c); };
  pb.admissible = [m, magkin_floor](const State& s) { return s.magkin <= m && s.magkin >= magkin_floor; };
  pb.shift = cfg.precond_shift > 0.0 ? cfg.precond_shift : std::max(1.0, std::abs(p.b));
  DescentOutcome o = descend(std::move(f0), p, pb, tol, cfg);

  GroundStateResult r(o.s.f);
  r.kind = "Im_c";
  r.c = c;
  r.m = m;
  finish(r, o, p);
  r.boundary_trapped = o.stalled_at_cap || r.magkin > 0.5 * m;
  return r;
}

GroundStateResult minimize_action(double omega, const Params& p, const Grid& grid, double tol,
                                  const std::optional<Field>& initial, DescentConfig cfg) {
  p.validate();
  if (!(omega > -std::abs(p.b)))
    throw PreconditionRefused("minimize_action: requires omega > -|b|");
  if (!(tol > 0.0)) throw InvalidArgument("minimize_action: tol must be positive");
  Field f0 = initial ? *initial : [&] {
    const double wt = std::sqrt(2.0 / std::abs(p.b));
    const double wz = 1.0 / std::sqrt(omega + std::abs(p.b));
    return gaussian(grid, GaussianSpec{1.0, {wt, wt, std::min(wz, wt)}, 0.0, {0.0, 0.0, 0.0}});
  }();
  if (!(f0.grid() == grid)) throw InvalidArgument("minimize_action: initial field is on a different grid");

  Problem pb;
  const double a = p.alpha;
  pb.objective = [=](const State& s) { return 0.5 * s.magkin + 0.5 * omega * s.mass - s.lp / (a + 2.0); };
  pb.multiplier = [omega](const State&) { return omega; };
  pb.projection = [=](const State& s) {
    const double h = s.magkin + omega * s.mass;
    return h > 0.0 && s.lp > 0.0 ? std::pow(h / s.lp, 1.0 / a) : std::numeric_limits<double>::quiet_NaN();
  };
  pb.shift = cfg.precond_shift > 0.0 ? cfg.precond_shift : std::max(1.0, omega + 2.0 * std::abs(p.b));
  DescentOutcome o = descend(std::move(f0), p, pb, tol, cfg);

  GroundStateResult r(o.s.f);
  r.kind = "action";
  finish(r, o, p);
  return r;
}

double fit_omega_bound(const std::vector<GroundStateResult>& states, const Params& p) {
  const double ab = std::abs(p.b), a = p.alpha;
  double k = 0.0;
  for (const auto& s : states) {
    const double scale = std::pow(s.c, (4.0 - a) / 4.0) * std::pow(s.m, (3.0 * a - 4.0) / 4.0);
    k = std::max(k, (1.0 + s.omega / ab) / scale);
  }
  return k;
}

double fit_decay_rate(const Field& phi) {
  const Grid& g = phi.grid();
  std::size_t imax = 0;
  double amax = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (std::abs(phi[i]) > amax) {
      amax = std::abs(phi[i]);
      imax = i;
    }
  if (!(amax > 0.0)) return 0.0;
  const auto ix = g.unravel(imax);
  const double z0 = g.coord(2, ix[2]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = 0; k < g.n(2); ++k) {
    const double dz = std::abs(g.coord(2, k) - z0);
    if (dz > 0.8 * g.half_width(2)) continue;
    const double v = std::abs(phi[g.index(ix[0], ix[1], k)]) / amax;
    if (v < 1e-9 || v > 1e-2) continue;
    const double y = std::log(v);
    sx += dz;
    sy += y;
    sxx += dz * dz;
    sxy += dz * y;
    ++n;
  }
  if (n < 4) return 0.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

std::vector<ScalingPoint> scaling_curve(const Field& phi, const Params& p, double omega,
                                        const std::vector<double>& lambdas) {
  const Integrals in = compute_integrals(phi, p);
  const double a = p.alpha, q = 0.25 * p.b * p.b;
  const double e = 1.5 * a;  // exponent of lambda in the L^{alpha+2} term
  std::vector<ScalingPoint> out;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw InvalidArgument("scaling_curve: lambda must be positive");
    const double l2 = lam * lam, lm2 = 1.0 / l2, le = std::pow(lam, e);
    ScalingPoint s;
    s.lambda = lam;
    s.S = 0.5 * (l2 * in.grad_sq + p.b * in.R + lm2 * q * in.rho_sq) + 0.5 * omega * in.mass -
          le * in.lp / (a + 2.0);
    s.dS = lam * in.grad_sq - lm2 / lam * q * in.rho_sq - e * le / lam * in.lp / (a + 2.0);
    s.d2S = in.grad_sq + 3.0 * lm2 * lm2 * q * in.rho_sq - e * (e - 1.0) * le * lm2 * in.lp / (a + 2.0);
    s.K = l2 * in.grad_sq + p.b * in.R + lm2 * q * in.rho_sq + omega * in.mass - le * in.lp;
    s.H = lam * s.dS;
    out.push_back(s);
  }
  return out;
}

Field dilate(const Field& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("dilate: lambda must be positive");
  const Grid& g = f.grid();
  Field c = f;
  spectral::forward(c);
  c *= 1.0 / static_cast<double>(g.size());
  std::array<int, 3> n = g.dims();
  for (int axis = 0; axis < 3; ++axis) {
    const int na = n[axis];
    const auto k = g.wavenumbers(axis);
    const double L = g.half_width(axis);
    // Row i: evaluation of the trigonometric series at lambda * x_i. Points
    // mapped outside the box would pick up a periodic image; the field is
    // taken to vanish there.
    std::vector<complex> mat(static_cast<std::size_t>(na) * na);
    for (int i = 0; i < na; ++i) {
      if (std::abs(lambda * g.coord(axis, i)) >= L) continue;
      const double y = lambda * g.coord(axis, i) + L;
      for (int m = 0; m < na; ++m) {
        const bool nyquist = na % 2 == 0 && m == na / 2;
        mat[static_cast<std::size_t>(i) * na + m] =
            nyquist ? complex(std::cos(k[m] * y), 0.0) : std::polar(1.0, k[m] * y);
      }
    }
    const std::size_t stride = axis == 0 ? static_cast<std::size_t>(n[1]) * n[2] : axis == 1 ? n[2] : 1;
    Field out(g);
    parallel_for(g.size() / na, [&](std::size_t line) {
      // Base index of the line: enumerate the two other axes.
      std::size_t base;
      if (axis == 0) base = line;
      else if (axis == 1) base = (line / n[2]) * n[1] * n[2] + line % n[2];
      else base = line * n[2];
      for (int i = 0; i < na; ++i) {
        complex acc = 0.0;
        const complex* row = mat.data() + static_cast<std::size_t>(i) * na;
        for (int m = 0; m < na; ++m) acc += row[m] * c[base + m * stride];
        out[base + i * stride] = acc;
      }
    });
    c = std::move(out);
  }
  c *= std::pow(lambda, 1.5);
  return c;
}

InstabilityReport instability_experiment(const GroundStateResult& gs, const Params& p, double lambda,
                                         const EvolveConfig& cfg) {
  p.validate();
  if (!(lambda > 0.0)) throw InvalidArgument("instability: lambda must be positive");
  if (gs.kind != "action") throw InvalidArgument("instability: needs an action ground state");
  if (!(gs.scaling_second_deriv <= 0.0)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "instability: d^2/dlambda^2 S_omega(phi^lambda) at lambda=1 is %.6g > 0", gs.scaling_second_deriv);
    throw PreconditionRefused(buf);
  }
  const double omega = gs.omega;
  const Field u0 = lambda == 1.0 ? gs.phi : dilate(gs.phi, lambda);

  double amax = 0.0;
  for (std::size_t i = 0; i < gs.phi.size(); ++i) amax = std::max(amax, std::abs(gs.phi[i]));
  double drift = 0.0;
  EvolveConfig c = cfg;
  c.observer = [&](const Field& u, const DiagnosticsRecord& r) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(std::abs(u[i]) - std::abs(gs.phi[i])));
    drift = std::max(drift, d / amax);
    if (cfg.observer) cfg.observer(u, r);
  };
  InstabilityReport rep(evolve(u0, p, c));
  rep.lambda = lambda;
  rep.d_omega = gs.objective;
  rep.scaling_second_deriv = gs.scaling_second_deriv;
  rep.modulus_drift = drift;

  const double a = p.alpha, q = 0.25 * p.b * p.b;
  for (const auto& r : rep.outcome.series) {
    MembershipRecord m;
    m.t = r.t;
    m.K = r.mag_kinetic_sq + omega * r.mass - r.lp_norm;
    m.H = r.grad_norm_sq - q * r.rho_norm_sq - 1.5 * a / (a + 2.0) * r.lp_norm;
    m.S = 0.5 * r.mag_kinetic_sq + 0.5 * omega * r.mass - r.lp_norm / (a + 2.0);
    m.Fsecond = 8.0 * m.H;
    m.in_set = m.K < 0.0 && m.H < 0.0 && m.S < rep.d_omega;
    m.key_inequality = m.H <= 2.0 * (m.S - rep.d_omega) + 1e-8 * r.grad_norm_sq;
    rep.membership_held = rep.membership_held && m.in_set;
    rep.key_inequality_held = rep.key_inequality_held && m.key_inequality;
    rep.membership.push_back(m);
  }
  if (!rep.membership.empty()) {
    rep.S_initial = rep.membership.front().S;
    rep.fsecond_bound = 16.0 * (rep.S_initial - rep.d_omega);
  }
  return rep;
}

std::string InstabilityReport::to_json() const {
  json j;
  j["lambda"] = lambda;
  j["status"] = to_string(outcome.status);
  j["t_end"] = outcome.t_end;
  j["blowup_time_estimate"] = outcome.blowup_time_estimate ? num(*outcome.blowup_time_estimate) : json(nullptr);
  j["d_omega"] = num(d_omega);
  j["S_initial"] = num(S_initial);
  j["scaling_second_deriv"] = num(scaling_second_deriv);
  j["fsecond_bound"] = num(fsecond_bound);
  j["membership_held"] = membership_held;
  j["key_inequality_held"] = key_inequality_held;
  j["modulus_drift"] = num(modulus_drift);
  json recs = json::array();
  for (const auto& m : membership)
    recs.push_back({{"t", m.t}, {"K", num(m.K)}, {"H", num(m.H)}, {"S", num(m.S)},
                    {"Fsecond", num(m.Fsecond)}, {"in_set", m.in_set}, {"key_inequality", m.key_inequality}});
  j["membership"] = recs;
  return j.dump(2);
}

std::string GroundStateResult::to_json(const Params& p) const {
  json j;
  j["kind"] = kind;
  j["alpha"] = p.alpha;
  j["b"] = p.b;
  j["omega"] = num(omega);
  j["objective"] = num(objective);
  j["residual_el"] = num(residual_el);
  j["k_omega"] = num(k_omega);
  j["h_value"] = num(h_value);
  j["decay_delta"] = num(decay_delta);
  j["scaling_second_deriv"] = num(scaling_second_deriv);
  j["grad_sq"] = num(grad_sq);
  j["magkin"] = num(magkin);
  j["mass"] = num(mass);
  j["iterations"] = iterations;
  j["boundary_trapped"] = boundary_trapped;
  json inputs;
  if (kind == "action") inputs["omega"] = omega;
  else inputs["c"] = c;
  if (kind == "Im_c") inputs["m"] = m;
  j["inputs"] = inputs;
  j["grid"] = {{"dims", phi.grid().dims()}, {"half_widths", phi.grid().half_widths()}};
  return j.dump(2);
}

void write_ground_state(const std::string& dir, const std::string& name, const GroundStateResult& gs,
                        const Params& p) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / name;
  write_checkpoint(base.string() + ".mnls", gs.phi, p, 0.0);
  std::FILE* fp = std::fopen((base.string() + ".json").c_str(), "wb");
  if (!fp) throw InvalidArgument("cannot write " + base.string() + ".json");
  const std::string text = gs.to_json(p) + "\n";
  std::fwrite(text.data(), 1, text.size(), fp);
  std::fclose(fp);
}

}  // namespace magnls
