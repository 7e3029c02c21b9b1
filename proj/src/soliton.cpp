#include "magnls/soliton.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "magnls/errors.hpp"

namespace magnls {

namespace {

constexpr double kRMax = 30.0;
constexpr double kTaylorStart = 1e-4;

struct State {
  double q, p;
};

struct RadialOde {
  double alpha;
  State rhs(double r, const State& y) const {
    const double nl = std::pow(std::abs(y.q), alpha) * y.q;
    return {y.p, -2.0 / r * y.p + y.q - nl};
  }
};

// Dormand-Prince 5(4) integration from r0 to r1 (either direction) with
// local error control.
State integrate(const RadialOde& ode, double r0, double r1, State y) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double rtol = 1e-14, atol = 1e-20;

  const double dir = r1 >= r0 ? 1.0 : -1.0;
  double r = r0;
  double habs = std::abs(r1 - r0);
  int guard = 0;
  while (dir * (r1 - r) > 0.0) {
    if (++guard > 100000) throw NumericalFailure("solve_q: step size underflow");
    habs = std::min(habs, dir * (r1 - r));
    const double h = dir * habs;
    auto add = [](const State& a, double s, const State& k) { return State{a.q + s * k.q, a.p + s * k.p}; };
    const State k1 = ode.rhs(r, y);
    const State k2 = ode.rhs(r + c2 * h, add(y, h * a21, k1));
    const State y3{y.q + h * (a31 * k1.q + a32 * k2.q), y.p + h * (a31 * k1.p + a32 * k2.p)};
    const State k3 = ode.rhs(r + c3 * h, y3);
    const State y4{y.q + h * (a41 * k1.q + a42 * k2.q + a43 * k3.q),
                   y.p + h * (a41 * k1.p + a42 * k2.p + a43 * k3.p)};
    const State k4 = ode.rhs(r + c4 * h, y4);
    const State y5{y.q + h * (a51 * k1.q + a52 * k2.q + a53 * k3.q + a54 * k4.q),
                   y.p + h * (a51 * k1.p + a52 * k2.p + a53 * k3.p + a54 * k4.p)};
    const State k5 = ode.rhs(r + c5 * h, y5);
    const State y6{y.q + h * (a61 * k1.q + a62 * k2.q + a63 * k3.q + a64 * k4.q + a65 * k5.q),
                   y.p + h * (a61 * k1.p + a62 * k2.p + a63 * k3.p + a64 * k4.p + a65 * k5.p)};
    const State k6 = ode.rhs(r + h, y6);
    const State yn{y.q + h * (b1 * k1.q + b3 * k3.q + b4 * k4.q + b5 * k5.q + b6 * k6.q),
                   y.p + h * (b1 * k1.p + b3 * k3.p + b4 * k4.p + b5 * k5.p + b6 * k6.p)};
    const State k7 = ode.rhs(r + h, yn);
    const double eq = h * (e1 * k1.q + e3 * k3.q + e4 * k4.q + e5 * k5.q + e6 * k6.q + e7 * k7.q);
    const double ep = h * (e1 * k1.p + e3 * k3.p + e4 * k4.p + e5 * k5.p + e6 * k6.p + e7 * k7.p);
    const double err = std::max(std::abs(eq) / (atol + rtol * std::max(std::abs(y.q), std::abs(yn.q))),
                                std::abs(ep) / (atol + rtol * std::max(std::abs(y.p), std::abs(yn.p))));
    if (err <= 1.0) {
      r = habs == dir * (r1 - r) ? r1 : r + h;
      y = yn;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    habs *= fac;
  }
  return y;
}

// Series Q0 + c r^2 + d r^4 about the origin, which removes the 2/r
// singularity from the first step.
State taylor_start(double q0, double alpha, double r) {
  const double c = (q0 - std::pow(q0, alpha + 1.0)) / 6.0;
  const double d = (1.0 - (alpha + 1.0) * std::pow(q0, alpha)) * c / 20.0;
  return {q0 + c * r * r + d * r * r * r * r, 2.0 * c * r + 4.0 * d * r * r * r};
}

enum class Fate { Crosses, TurnsUp, Undecided };

// Follows the trajectory node by node; optionally records node values.
Fate shoot(double q0, double alpha, int per_unit, std::vector<State>* nodes) {
  const RadialOde ode{alpha};
  const int nmax = static_cast<int>(std::lround(kRMax)) * per_unit;
  State y = taylor_start(q0, alpha, kTaylorStart);
  double r = kTaylorStart;
  if (nodes) nodes->assign(1, State{q0, 0.0});
  for (int i = 1; i <= nmax; ++i) {
    const double rn = static_cast<double>(i) / per_unit;
    y = integrate(ode, r, rn, y);
    r = rn;
    if (nodes) nodes->push_back(y);
    if (y.q < 0.0) return Fate::Crosses;
    if (y.p > 0.0) return Fate::TurnsUp;
  }
  return Fate::Undecided;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;  // intervals, even
  double s = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

bool is_mass_critical(double alpha) { return std::abs(alpha - 4.0 / 3.0) < 1e-12; }

bool QConstants::mass_critical() const { return is_mass_critical(alpha); }

double RadialProfile::value(double r) const {
  r = std::abs(r);
  if (r >= r_max()) return tail_amp * std::exp(-tail_rate * r) / r;
  const double h = r_nodes[1] - r_nodes[0];
  const std::size_t i = std::min(static_cast<std::size_t>(r / h), r_nodes.size() - 2);
  const double t = (r - r_nodes[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * q_values[i] + h10 * h * dq_values[i] + h01 * q_values[i + 1] +
         h11 * h * dq_values[i + 1];
}

double RadialProfile::derivative(double r) const {
  const double s = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= r_max()) return s * (-tail_amp * std::exp(-tail_rate * r) * (tail_rate / r + 1.0 / (r * r)));
  const double h = r_nodes[1] - r_nodes[0];
  const std::size_t i = std::min(static_cast<std::size_t>(r / h), r_nodes.size() - 2);
  const double t = (r - r_nodes[i]) / h;
  const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
  return s * (d00 * q_values[i] / h + d10 * dq_values[i] + d01 * q_values[i + 1] / h +
              d11 * dq_values[i + 1]);
}

RadialProfile solve_q(double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 4.0)) throw InvalidArgument("solve_q: alpha must lie in (0,4)");
  if (!(tol > 0.0)) throw InvalidArgument("solve_q: tol must be positive");

  // Below Q(0) = 1 the trajectory turns up immediately; grow hi until it
  // crosses zero.
  auto bisect = [&](double& lo, double& hi, int per_unit, double rel) {
    for (int it = 0; it < 200 && hi - lo > rel * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const Fate f = shoot(mid, alpha, per_unit, nullptr);
      if (f == Fate::Crosses) hi = mid;
      else if (f == Fate::TurnsUp) lo = mid;
      else { lo = hi = mid; break; }
    }
  };
  double lo = 1.0, hi = 2.0;
  for (int k = 0; shoot(hi, alpha, 100, nullptr) != Fate::Crosses; ++k) {
    if (k > 60) throw NumericalFailure("solve_q: shooting bracket does not enclose the ground state");
    lo = hi;
    hi *= 2.0;
  }
  if (shoot(lo, alpha, 100, nullptr) != Fate::TurnsUp)
    throw NumericalFailure("solve_q: shooting bracket does not enclose the ground state");
  bisect(lo, hi, 100, 1e-6);

  // Node density follows the core width Q(0)^{-alpha/2}.
  const int per_unit = std::max(200, 2 * static_cast<int>(std::ceil(40.0 * std::pow(hi, 0.5 * alpha))));
  const double h_node = 1.0 / per_unit;
  lo *= 1.0 - 1e-5;
  hi *= 1.0 + 1e-5;
  if (shoot(lo, alpha, per_unit, nullptr) != Fate::TurnsUp || shoot(hi, alpha, per_unit, nullptr) != Fate::Crosses)
    throw NumericalFailure("solve_q: shooting bracket does not enclose the ground state");
  bisect(lo, hi, per_unit, 0.0);

  std::vector<State> tr_lo, tr_hi;
  shoot(lo, alpha, per_unit, &tr_lo);
  shoot(hi, alpha, per_unit, &tr_hi);
  const std::size_t navail = std::min(tr_lo.size(), tr_hi.size());
  // Average of the bracketing trajectories; stop where they separate.
  std::vector<State> mid;
  for (std::size_t i = 0; i < navail; ++i) {
    const State m{0.5 * (tr_lo[i].q + tr_hi[i].q), 0.5 * (tr_lo[i].p + tr_hi[i].p)};
    if (i > 10 && (std::abs(tr_hi[i].q - tr_lo[i].q) > 1e-9 * std::abs(m.q) || m.q <= 0.0 || m.p >= 0.0))
      break;
    mid.push_back(m);
  }
  if (mid.size() < static_cast<std::size_t>(2 * per_unit)) throw NumericalFailure("solve_q: shooting trajectory separated too early");
  // Non-monotone candidates are excited states.
  for (std::size_t i = 1; i < mid.size(); ++i)
    if (!(mid[i].q < mid[i - 1].q) || mid[i].q <= 0.0)
      throw NumericalFailure("solve_q: non-monotone candidate rejected");

  // Beyond the matching radius the profile comes from integrating inward
  // from r_max along the decaying asymptotics A e^{-r}/r, with A chosen so
  // that Q is continuous at the matching node.
  const std::size_t ic = std::min<std::size_t>(mid.size() - 1, static_cast<std::size_t>(6 * per_unit));
  const double rc = static_cast<double>(ic) / per_unit;
  const int nmax = static_cast<int>(std::lround(kRMax)) * per_unit;
  const RadialOde ode{alpha};
  auto inward = [&](double amp, std::vector<State>* out) {
    const double R = kRMax;
    State y{amp * std::exp(-R) / R, -amp * std::exp(-R) * (1.0 / R + 1.0 / (R * R))};
    if (out) {
      out->assign(nmax + 1, State{0.0, 0.0});
      (*out)[nmax] = y;
    }
    for (int i = nmax - 1; i >= static_cast<int>(ic); --i) {
      y = integrate(ode, static_cast<double>(i + 1) / per_unit, static_cast<double>(i) / per_unit, y);
      if (out) (*out)[i] = y;
    }
    return y.q;
  };
  double a0 = mid[ic].q * rc * std::exp(rc);
  double f0 = inward(a0, nullptr) - mid[ic].q;
  double a1 = a0 * (1.0 + 1e-3);
  double f1 = inward(a1, nullptr) - mid[ic].q;
  for (int it = 0; it < 50 && f1 != 0.0 && f1 != f0; ++it) {
    const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
    a0 = a1; f0 = f1;
    a1 = a2; f1 = inward(a1, nullptr) - mid[ic].q;
  }
  std::vector<State> back;
  inward(a1, &back);

  RadialProfile prof;
  prof.alpha = alpha;
  prof.tol = tol;
  prof.shoot_radius = rc;
  prof.r_nodes.resize(nmax + 1);
  prof.q_values.resize(nmax + 1);
  prof.dq_values.resize(nmax + 1);
  for (int i = 0; i <= nmax; ++i) {
    prof.r_nodes[i] = static_cast<double>(i) / per_unit;
    const State& s = static_cast<std::size_t>(i) < ic ? mid[i] : back[i];
    prof.q_values[i] = s.q;
    prof.dq_values[i] = s.p;
  }

  // Tail fit log(r Q) = log A - kappa r over the last decade of the profile.
  {
    const double qend = prof.q_values.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 1; i < prof.r_nodes.size(); ++i) {
      if (prof.q_values[i] > 10.0 * qend) continue;
      const double x = prof.r_nodes[i], y = std::log(prof.r_nodes[i] * prof.q_values[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    prof.tail_rate = -slope;
    prof.tail_amp = prof.q_values.back() * kRMax * std::exp(prof.tail_rate * kRMax);
  }

  // ODE residual with an eighth-order central difference of Q'.
  {
    const auto& dq = prof.dq_values;
    const double h = h_node;
    auto dqat = [&](long j) { return j < 0 ? -dq[-j] : dq[j]; };
    static constexpr double w[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    double worst = 0.0;
    for (long i = 1; i + 4 < static_cast<long>(dq.size()); ++i) {
      double d2 = 0.0;
      for (int m = 1; m <= 4; ++m) d2 += w[m - 1] * (dqat(i + m) - dqat(i - m));
      d2 /= h;
      const double q = prof.q_values[i];
      const double res = d2 + 2.0 / prof.r_nodes[i] * dq[i] - q + std::pow(q, alpha + 1.0);
      worst = std::max(worst, std::abs(res));
    }
    prof.max_ode_residual = worst;
  }
  if (prof.max_ode_residual > tol)
  {
    char buf[128];
    std::snprintf(buf, sizeof buf, "solve_q: ODE residual %.3e exceeds tolerance %.3e",
                  prof.max_ode_residual, tol);
    throw NumericalFailure(buf);
  }
  if (!(prof.q_values.back() < 1e-10 * prof.q_values.front()))
    throw NumericalFailure("solve_q: profile has not decayed at r_max");
  if (std::abs(prof.tail_rate - 1.0) > 0.05)
    throw NumericalFailure("solve_q: tail rate inconsistent with e^{-r} decay");
  return prof;
}

QConstants q_constants(const RadialProfile& profile) {
  const double a = profile.alpha;
  const auto& r = profile.r_nodes;
  const double h = r[1] - r[0];
  std::vector<double> fm(r.size()), fg(r.size()), fl(r.size()), fr(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double q = profile.q_values[i], dq = profile.dq_values[i], r2 = r[i] * r[i];
    fm[i] = r2 * q * q;
    fg[i] = r2 * dq * dq;
    fl[i] = r2 * std::pow(q, a + 2.0);
    fr[i] = r2 * r2 * q * q;
  }
  const double four_pi = 4.0 * std::numbers::pi;
  const double R = profile.r_max();
  // Analytic tails of the e^{-r}/r asymptotics beyond r_max.
  const double A = profile.q_values.back() * R * std::exp(R);
  const double tail_m = A * A * std::exp(-2 * R) / 2.0;
  const double tail_g = A * A * std::exp(-2 * R) * (0.5 + 1.0 / R);
  const double tail_r = A * A * std::exp(-2 * R) * (R * R / 2 + R / 2 + 0.25);

  QConstants c;
  c.alpha = a;
  c.mass_Q = four_pi * (simpson(fm, h) + tail_m);
  c.grad_Q_sq = four_pi * (simpson(fg, h) + tail_g);
  c.lp_Q = four_pi * simpson(fl, h);
  c.rho_Q_sq = 2.0 / 3.0 * four_pi * (simpson(fr, h) + tail_r);
  c.pohozaev_residual_grad = std::abs(c.mass_Q - (4 - a) / (3 * a) * c.grad_Q_sq) / c.mass_Q;
  c.pohozaev_residual_lp = std::abs(c.mass_Q - (4 - a) / (2 * (a + 2)) * c.lp_Q) / c.mass_Q;
  if (c.pohozaev_residual_grad > 1e-6 || c.pohozaev_residual_lp > 1e-6)
    throw NumericalFailure("q_constants: Pohozaev residual too large, profile unconverged");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  c.c_opt_direct = c.lp_Q / (std::pow(c.grad_Q_sq, 0.75 * a) * std::pow(c.mass_Q, (4 - a) / 4));
  if (is_mass_critical(a)) {
    c.sigma_c = std::numeric_limits<double>::infinity();
    c.c_opt = c.c_opt_direct;
    c.e0_mq = c.e0_mq_direct = nan;
    c.grad_mass_product = c.lp_mass_product = nan;
    return c;
  }
  c.sigma_c = (4 - a) / (3 * a - 4);
  c.grad_mass_product = std::sqrt(c.grad_Q_sq) * std::pow(c.mass_Q, 0.5 * c.sigma_c);
  c.lp_mass_product = c.lp_Q * std::pow(c.mass_Q, c.sigma_c);
  c.e0_mq = (3 * a - 4) / (6 * a) * c.grad_mass_product * c.grad_mass_product;
  c.c_opt = 2 * (a + 2) / (3 * a) * std::pow(c.grad_mass_product, -(3 * a - 4) / 2);
  c.e0_mq_direct = (0.5 * c.grad_Q_sq - c.lp_Q / (a + 2)) * std::pow(c.mass_Q, c.sigma_c);
  return c;
}

Field sample_radial(const RadialProfile& profile, const Grid& grid, double amplitude, double scale,
                    std::array<double, 3> center) {
  if (!(scale > 0.0)) throw InvalidArgument("sample_radial: scale must be positive");
  if (profile.r_nodes.size() < 2 || !(profile.tail_amp > 0.0))
    throw InvalidArgument("sample_radial: profile has no tail fit");
  Field f(grid);
  if (amplitude == 0.0) return f;
  const double pre = amplitude * std::pow(scale, 1.5);
  const auto x0 = grid.coords(0), x1 = grid.coords(1), x2 = grid.coords(2);
  for (int i = 0; i < grid.n(0); ++i)
    for (int j = 0; j < grid.n(1); ++j)
      for (int k = 0; k < grid.n(2); ++k) {
        const double dx = x0[i] - center[0], dy = x1[j] - center[1], dz = x2[k] - center[2];
        f[grid.index(i, j, k)] = pre * profile.value(scale * std::sqrt(dx * dx + dy * dy + dz * dz));
      }
  return f;
}

std::string profile_to_json(const RadialProfile& p, const QConstants& c) {
  nlohmann::json j;
  j["alpha"] = p.alpha;
  j["tol"] = p.tol;
  j["nodes"] = p.r_nodes;
  j["values"] = p.q_values;
  j["derivatives"] = p.dq_values;
  j["tail_rate"] = p.tail_rate;
  j["tail_amp"] = p.tail_amp;
  j["shoot_radius"] = p.shoot_radius;
  j["max_ode_residual"] = p.max_ode_residual;
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["constants"] = {{"mass_Q", c.mass_Q},
                    {"grad_Q_sq", c.grad_Q_sq},
                    {"lp_Q", c.lp_Q},
                    {"rho_Q_sq", c.rho_Q_sq},
                    {"sigma_c", num(c.sigma_c)},
                    {"c_opt", c.c_opt},
                    {"e0_mq", num(c.e0_mq)},
                    {"grad_mass_product", num(c.grad_mass_product)},
                    {"lp_mass_product", num(c.lp_mass_product)},
                    {"pohozaev_residual_grad", c.pohozaev_residual_grad},
                    {"pohozaev_residual_lp", c.pohozaev_residual_lp}};
  return j.dump(2);
}

RadialProfile profile_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RadialProfile p;
    p.alpha = j.at("alpha").get<double>();
    p.tol = j.at("tol").get<double>();
    p.r_nodes = j.at("nodes").get<std::vector<double>>();
    p.q_values = j.at("values").get<std::vector<double>>();
    p.dq_values = j.at("derivatives").get<std::vector<double>>();
    p.tail_rate = j.at("tail_rate").get<double>();
    p.tail_amp = j.at("tail_amp").get<double>();
    p.shoot_radius = j.value("shoot_radius", 0.0);
    p.max_ode_residual = j.value("max_ode_residual", 0.0);
    if (p.r_nodes.size() < 2 || p.q_values.size() != p.r_nodes.size() ||
        p.dq_values.size() != p.r_nodes.size())
      throw InvalidArgument("profile json: inconsistent node arrays");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("profile json: ") + e.what());
  }
}

RadialProfile load_or_solve_q(const std::string& cache_dir, double alpha, double tol) {
  namespace fs = std::filesystem;
  std::ostringstream name;
  name.precision(17);
  name << "q_alpha" << alpha << "_tol" << tol << ".json";
  const fs::path path = fs::path(cache_dir) / name.str();
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json(ss.str());
  }
  RadialProfile p = solve_q(alpha, tol);
  fs::create_directories(cache_dir);
  std::ofstream out(path);
  out << profile_to_json(p, q_constants(p));
  return p;
}

}  // namespace magnls
