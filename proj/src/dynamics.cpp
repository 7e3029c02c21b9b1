#include "magnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "magnls/checkpoint.hpp"
#include "magnls/errors.hpp"
#include "magnls/parallel.hpp"
#include "magnls/spectral.hpp"

namespace magnls {

std::string to_string(EvolveStatus s) {
  switch (s) {
    case EvolveStatus::ReachedTFinal: return "ReachedTFinal";
    case EvolveStatus::NumericalBlowUp: return "NumericalBlowUp";
    case EvolveStatus::ResolutionLoss: return "ResolutionLoss";
  }
  return "Unknown";
}

void EvolveConfig::validate() const {
  if (!(dt_initial > 0.0)) throw InvalidArgument("evolve: dt must be positive");
  if (!(t_final >= 0.0)) throw InvalidArgument("evolve: t_final must be nonnegative");
  if (!(blowup_grad_ratio > 1.0)) throw InvalidArgument("evolve: blowup_grad_ratio must exceed 1");
  if (!(tail_fraction_max > 0.0 && tail_fraction_max < 1.0))
    throw InvalidArgument("evolve: tail_fraction_max must lie in (0,1)");
  if (order != 2 && order != 4) throw InvalidArgument("evolve: order must be 2 or 4");
  if (record_stride < 1) throw InvalidArgument("evolve: record_stride must be >= 1");
}

namespace {

// exp(-i tau (k^2 + s k)) along `axis`, where s is constant on each chunk.
void axis_phase(Field& u, int axis, double tau, const std::function<double(std::size_t)>& shift) {
  const Grid& g = u.grid();
  const int n = g.n(axis);
  const auto k = g.wavenumbers(axis);
  const double inv_n = 1.0 / n;
  complex* data = u.data();
  parallel_for(spectral::axis_chunks(g, axis), [&](std::size_t c) {
    std::vector<complex> phase(n);
    const double s = shift(c);
    for (int i = 0; i < n; ++i) phase[i] = std::polar(inv_n, -tau * (k[i] * k[i] + s * k[i]));
    spectral::transform_chunk(g, data, axis, c, -1);
    spectral::for_each_in_chunk(g, axis, c, [&](std::size_t idx, int ki) { data[idx] *= phase[ki]; });
    spectral::transform_chunk(g, data, axis, c, +1);
  });
}

}  // namespace

void directional_flow(Field& u, const Params& p, double half, double full) {
  const Grid& g = u.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1);
  // Axis-0 chunks are indexed by i1, axis-1 chunks by i0.
  auto s0 = [&](std::size_t c) { return -p.b * x1[c]; };
  auto s1 = [&](std::size_t c) { return p.b * x0[c]; };
  auto s2 = [](std::size_t) { return 0.0; };
  axis_phase(u, 0, half, s0);
  axis_phase(u, 1, half, s1);
  axis_phase(u, 2, full, s2);
  axis_phase(u, 1, half, s1);
  axis_phase(u, 0, half, s0);
}

void pointwise_flow(Field& u, const Params& p, double tau, bool nonlinear) {
  const Grid& g = u.grid();
  const auto x0 = g.coords(0), x1 = g.coords(1);
  const int n1 = g.n(1), n2 = g.n(2);
  const double q = 0.25 * p.b * p.b;
  const double ha = 0.5 * p.alpha;
  const bool cubic = p.alpha == 2.0;
  complex* d = u.data();
  parallel_for(static_cast<std::size_t>(g.n(0)), [&](std::size_t i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const double v = q * (x0[i0] * x0[i0] + x1[i1] * x1[i1]);
      complex* row = d + g.index(static_cast<int>(i0), i1, 0);
      for (int i2 = 0; i2 < n2; ++i2) {
        double w = v;
        if (nonlinear) {
          const double m = std::norm(row[i2]);
          w -= cubic ? m : (m > 0.0 ? std::pow(m, ha) : 0.0);
        }
        row[i2] *= std::polar(1.0, -tau * w);
      }
    }
  });
}

Field step(const Field& state, const Params& p, double dt, bool nonlinear) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  state.check_shape();
  Field u = state;
  pointwise_flow(u, p, 0.5 * dt, nonlinear);
  directional_flow(u, p, 0.5 * dt, dt);
  pointwise_flow(u, p, 0.5 * dt, nonlinear);
  return u;
}

double spectral_tail_fraction(const Field& f) {
  Field c = f;
  spectral::forward(c);
  const Grid& g = c.grid();
  std::array<std::vector<char>, 3> high;
  for (int j = 0; j < 3; ++j) {
    const auto k = g.wavenumbers(j);
    const double kmax = std::numbers::pi * (g.n(j) / 2) / g.half_width(j);
    high[j].resize(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) high[j][i] = std::abs(k[i]) > 2.0 / 3.0 * kmax;
  }
  const auto s = reduce_sums<2>(c.size(), [&](std::size_t i, double* v) {
    const auto ix = g.unravel(i);
    const double m = std::norm(c[i]);
    v[0] = m;
    v[1] = (high[0][ix[0]] || high[1][ix[1]] || high[2][ix[2]]) ? m : 0.0;
  });
  return s[0] > 0.0 ? s[1] / s[0] : 0.0;
}

std::optional<double> detect_blowup(const std::vector<DiagnosticsRecord>& series,
                                    const EvolveConfig& cfg) {
  if (series.empty()) throw InvalidArgument("detect_blowup: empty series");
  const double g0 = series.front().grad_norm_sq;
  if (!(g0 > 0.0)) return std::nullopt;
  const double thr2 = cfg.blowup_grad_ratio * cfg.blowup_grad_ratio;
  std::size_t first = series.size();
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i].grad_norm_sq >= thr2 * g0) {
      first = i;
      break;
    }
  if (first == series.size()) return std::nullopt;
  // Least-squares line through the last few points of 1/||grad u||^2.
  const std::size_t n = series.size();
  const std::size_t lo = n >= 4 ? n - 4 : 0;
  double st = 0, sy = 0, stt = 0, sty = 0;
  int cnt = 0;
  for (std::size_t i = lo; i < n; ++i) {
    const double t = series[i].t, y = 1.0 / series[i].grad_norm_sq;
    st += t; sy += y; stt += t * t; sty += t * y; ++cnt;
  }
  if (cnt < 2) return series.back().t;
  const double den = cnt * stt - st * st;
  if (!(std::abs(den) > 0.0)) return series.back().t;
  const double slope = (cnt * sty - st * sy) / den;
  const double icpt = (sy - slope * st) / cnt;
  if (!(slope < 0.0)) return series.back().t;
  return std::max(series.back().t, -icpt / slope);
}

EvolveOutcome evolve(const Field& u0, const Params& p, const EvolveConfig& cfg) {
  cfg.validate();
  p.validate();
  u0.check_shape();
  if (!u0.all_finite()) throw InvalidArgument("evolve: initial field is not finite");

  EvolveOutcome out(u0);
  Field& u = out.final_state;
  double t = 0.0;
  double dt = cfg.dt_initial;
  int records = 0;

  auto record = [&](double time) {
    const auto r = diagnostics(u, p, time);
    out.series.push_back(r);
    out.tail_fractions.push_back(spectral_tail_fraction(u));
    out.dts.push_back(dt);
    if (cfg.observer) cfg.observer(u, r);
    if (cfg.checkpoint_stride > 0 && records % cfg.checkpoint_stride == 0) {
      std::filesystem::create_directories(cfg.checkpoint_dir);
      char name[64];
      std::snprintf(name, sizeof name, "state_%06d.mnls", records);
      write_checkpoint((std::filesystem::path(cfg.checkpoint_dir) / name).string(), u, p, time);
    }
    ++records;
  };
  record(0.0);
  const double g0 = out.series.front().grad_norm_sq;
  const double thr2 = cfg.blowup_grad_ratio * cfg.blowup_grad_ratio;
  const double dt_floor = cfg.dt_initial * 1e-7;
  const double cbrt2 = std::cbrt(2.0);
  const std::vector<double> weights = cfg.order == 4
                                          ? std::vector<double>{1.0 / (2.0 - cbrt2), -cbrt2 / (2.0 - cbrt2),
                                                                1.0 / (2.0 - cbrt2)}
                                          : std::vector<double>{1.0};

  auto finish = [&](EvolveStatus s, std::string msg) {
    out.status = s;
    out.t_end = t;
    out.message = std::move(msg);
    out.final_finite = u.all_finite();
    out.blowup_time_estimate = s == EvolveStatus::NumericalBlowUp ? detect_blowup(out.series, cfg)
                                                                  : std::nullopt;
    return out;
  };

  while (t < cfg.t_final) {
    // One batch of record_stride steps at fixed dt; adjacent pointwise
    // half-steps are merged since |u| is invariant under them.
    double pending = 0.0;
    for (int taken = 0; taken < cfg.record_stride && t < cfg.t_final; ++taken) {
      double h = dt;
      const bool last = t + h >= cfg.t_final - 1e-9 * h;
      if (last) h = cfg.t_final - t;
      for (double w : weights) {
        pointwise_flow(u, p, pending + 0.5 * w * h, cfg.nonlinear);
        directional_flow(u, p, 0.5 * w * h, w * h);
        pending = 0.5 * w * h;
      }
      t = last ? cfg.t_final : t + h;
      ++out.steps;
    }
    pointwise_flow(u, p, pending, cfg.nonlinear);
    if (!u.all_finite()) {
      record(t);
      return finish(EvolveStatus::ResolutionLoss, "non-finite values in the state");
    }
    record(t);
    const auto& r = out.series.back();
    const double tail = out.tail_fractions.back();
    const double ratio2 = g0 > 0.0 ? r.grad_norm_sq / g0 : 1.0;
    if (tail >= cfg.tail_fraction_max) {
      if (ratio2 >= thr2) return finish(EvolveStatus::NumericalBlowUp, "gradient and spectral tail thresholds crossed");
      if (ratio2 < 1.1 || tail >= 1e4 * cfg.tail_fraction_max)
        return finish(EvolveStatus::ResolutionLoss, "spectral tail grew without gradient growth");
    }
    if (cfg.adapt) {
      dt = cfg.dt_initial * std::min(1.0, g0 / r.grad_norm_sq);
      if (dt < dt_floor) {
        if (ratio2 >= thr2 && tail >= cfg.tail_fraction_max)
          return finish(EvolveStatus::NumericalBlowUp, "step size collapsed");
        return finish(EvolveStatus::ResolutionLoss, "step size collapsed before blow-up criteria were met");
      }
    }
  }
  return finish(EvolveStatus::ReachedTFinal, "");
}

}  // namespace magnls
