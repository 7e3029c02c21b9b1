#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "magnls/classify.hpp"
#include "magnls/dynamics.hpp"
#include "magnls/functionals.hpp"
#include "magnls/ground_states.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/parallel.hpp"
#include "magnls/scenario.hpp"
#include "magnls/soliton.hpp"
#include "q_oracle.hpp"

using namespace magnls;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string failed_checks(const SuiteRun& r) {
  std::string s;
  for (const auto& [k, v] : r.checks)
    if (!v) s += " " + k;
  return s;
}

Result soliton_constants() {
  bool ok = true;
  std::string d;
  for (double a : {4.0 / 3.0, 2.0, 3.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const QConstants qc = q_constants(solve_q(a, 1e-10));
    const double secs = seconds_since(t0);
    const auto s = magnls::test::spectral_q(a);
    const double agree = std::abs(qc.mass_Q / s.mass - 1.0);
    const double poh = std::max(qc.pohozaev_residual_grad, qc.pohozaev_residual_lp);
    ok = ok && poh < 1e-8 && agree < 1e-6 && secs < 5.0;
    d += fmt(" a=%.4g: M(Q)=%.9f pohozaev=%.1e spectral_agree=%.1e %.2fs;", a, qc.mass_Q, poh, agree, secs);
  }
  return {ok, d};
}

struct VerifyRun {
  VerifyReport report;
  double seconds;
};

const VerifyRun& verify_run() {
  static const VerifyRun v = [] {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport r = verify_suite(7, 1000, 2.0, Grid({32, 32, 32}, {8.0, 8.0, 8.0}));
    return VerifyRun{r, seconds_since(t0)};
  }();
  return v;
}

Result identity_suite() {
  const auto& v = verify_run();
  bool ok = v.seconds < 60.0;
  std::string d;
  for (const auto& [k, s] : v.report.identities) {
    ok = ok && s.violations == 0;
    d += fmt(" %s max=%.1e (tol %.0e, %ld violations);", k.c_str(), s.worst, v.report.identity_tolerance.at(k), s.violations);
  }
  return {ok, d + fmt(" 1000 samples (shared with criterion 3) in %.1fs", v.seconds)};
}

Result inequality_suite() {
  const auto& v = verify_run();
  bool ok = true;
  std::string d;
  for (const auto& [k, s] : v.report.inequalities) {
    ok = ok && s.violations == 0;
    d += fmt(" %s violations=%ld min_margin=%.3f;", k.c_str(), s.violations, s.worst);
  }
  return {ok, d};
}

// Off-axis Gaussian with transverse momentum, so that R is far from zero.
Field rotating_packet(const Grid& g) {
  Field f = gaussian(g, {1.0, {1.2, 1.0, 1.4}, 0.0, {0.8, 0.0, 0.0}});
  for (int i = 0; i < g.n(0); ++i)
    for (int j = 0; j < g.n(1); ++j)
      for (int k = 0; k < g.n(2); ++k) f[g.index(i, j, k)] *= std::polar(1.0, 0.7 * g.coord(1, j));
  return f;
}

Result conservation() {
  const Params p{1.0, 2.0};
  // The box must keep the outer shell empty over the run: mass reaching it
  // breaks the rotation invariance that conserves R.
  const Grid g({64, 64, 64}, {10.0, 10.0, 10.0});
  const Field u0 = rotating_packet(g);
  struct Drift {
    double M, E, R;
  };
  auto run = [&](double dt) {
    EvolveConfig cfg;
    cfg.dt_initial = dt;
    cfg.t_final = 1.0;
    cfg.record_stride = static_cast<int>(std::lround(0.05 / dt));
    const EvolveOutcome o = evolve(u0, p, cfg);
    const auto& a = o.series.front();
    Drift d{0, 0, 0};
    for (const auto& r : o.series) {
      d.M = std::max(d.M, std::abs(r.mass - a.mass) / a.mass);
      d.E = std::max(d.E, std::abs(r.energy_E - a.energy_E) / std::abs(a.energy_E));
      d.R = std::max(d.R, std::abs(r.angular_R - a.angular_R) / std::abs(a.angular_R));
    }
    return d;
  };
  const Drift d1 = run(1e-3), d2 = run(5e-4);
  const double rE = d1.E / d2.E, rR = d1.R / d2.R;
  const bool ok = d1.M < 1e-10 && d1.E < 1e-6 && d1.R < 1e-6 && rE >= 3.5 && rR >= 3.5;
  return {ok, fmt(" dt=1e-3: dM=%.1e dE=%.1e dR=%.1e; dt=5e-4: dE=%.1e dR=%.1e; halving ratios E %.2f R %.2f",
                  d1.M, d1.E, d1.R, d2.E, d2.R, rE, rR)};
}

Result virial_consistency() {
  const Params p{1.0, 2.0};
  const Grid g({64, 64, 64}, {8.0, 8.0, 8.0});
  const Field u0 = gaussian(g, {1.6, {1.1, 1.1, 1.3}, 0.1, {0.0, 0.0, 0.0}});
  EvolveConfig cfg;
  cfg.dt_initial = 5e-4;
  cfg.t_final = 0.4;
  cfg.record_stride = 20;
  std::vector<double> fs;
  cfg.observer = [&](const Field& u, const DiagnosticsRecord&) { fs.push_back(virial_Fsecond(u, p)); };
  const EvolveOutcome o = evolve(u0, p, cfg);
  const double h = cfg.dt_initial * cfg.record_stride;
  double worst = 0.0, scale = 0.0;
  for (double v : fs) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i + 1 < o.series.size(); ++i) {
    const double fd = (o.series[i + 1].virial_F - 2 * o.series[i].virial_F + o.series[i - 1].virial_F) / (h * h);
    worst = std::max(worst, std::abs(fd - fs[i]) / scale);
  }
  return {worst < 0.01 && o.status == EvolveStatus::ReachedTFinal,
          fmt(" max |second difference - F''| / max|F''| = %.2e over %zu records (F'' from %.3g to %.3g)", worst,
              o.series.size(), fs.front(), fs.back())};
}

Result mass_critical_dichotomy() {
  const Params p{1.0, 4.0 / 3.0};
  const DichotomyReport rep = dichotomy_suite(p, solve_q(p.alpha, 1e-10), default_dichotomy_settings(p.alpha));
  std::string d;
  for (const auto& r : rep.runs) {
    d += " " + r.name + ": " + r.verdict + " -> " + to_string(r.outcome.status) + fmt(" at t=%.3f", r.outcome.t_end);
    if (r.numbers.count("magkin_cap"))
      d += fmt(" (max magkin %.2f < cap %.2f)", r.numbers.at("max_magkin"), r.numbers.at("magkin_cap"));
    if (r.numbers.count("virial_parabola_root"))
      d += fmt(" (lambda=%.3f, virial root %.3f)", r.numbers.at("lambda"), r.numbers.at("virial_parabola_root"));
    d += failed_checks(r) + ";";
  }
  return {rep.passed(), d};
}

const DichotomyReport& supercritical_report() {
  static const DichotomyReport rep = [] {
    const Params p{1.0, 2.0};
    return dichotomy_suite(p, solve_q(p.alpha, 1e-10), default_dichotomy_settings(p.alpha));
  }();
  return rep;
}

Result supercritical_dichotomy() {
  bool ok = true;
  std::string d;
  for (const auto& r : supercritical_report().runs) {
    if (r.name == "above_threshold_chirped") continue;
    ok = ok && r.passed();
    d += " " + r.name + ": " + r.verdict + " -> " + to_string(r.outcome.status) +
         fmt(" at t=%.3f, E0*M/threshold=%.3f", r.outcome.t_end, r.numbers.at("energy_ratio"));
    if (r.numbers.count("max_gradient_ratio")) d += fmt(", max gradient ratio %.3f", r.numbers.at("max_gradient_ratio"));
    d += failed_checks(r) + ";";
  }
  return {ok, d};
}

Result above_threshold() {
  for (const auto& r : supercritical_report().runs) {
    if (r.name != "above_threshold_chirped") continue;
    return {r.passed(), fmt(" chirp=%.4f lambda0=%.4f residual=%.1e; %s at t=%.3f;", r.numbers.at("chirp"),
                            r.numbers.at("lambda0"), r.numbers.at("lambda0_implicit_residual"),
                            to_string(r.outcome.status).c_str(), r.outcome.t_end) +
                            failed_checks(r)};
  }
  return {false, " no above-threshold run"};
}

const GroundStateResult& action_ground_state() {
  static const GroundStateResult gs =
      minimize_action(0.0, {1.0, 2.0}, Grid({64, 64, 192}, {7.0, 7.0, 20.0}), 1e-8);
  return gs;
}

Result ground_states() {
  const Params p{1.0, 2.0};
  auto t0 = std::chrono::steady_clock::now();
  const GroundStateResult& a = action_ground_state();
  const double ta = seconds_since(t0);
  const double kr = std::abs(a.k_omega) / a.grad_sq, hr = std::abs(a.h_value) / a.grad_sq;
  const bool ok_a = kr < 1e-6 && hr < 1e-6 && a.residual_el < 1e-6 && a.decay_delta > 0.0 && ta < 600.0;
  t0 = std::chrono::steady_clock::now();
  const GroundStateResult m = minimize_Im_c(4.0, 10.0, p, Grid({48, 48, 128}, {7.0, 7.0, 120.0}), 1e-8);
  const double tm = seconds_since(t0);
  const double K = fit_omega_bound({m}, p);
  const bool ok_m = m.omega > -std::abs(p.b) && m.omega < 0.0 && !m.boundary_trapped && tm < 600.0;
  return {ok_a && ok_m,
          fmt(" action(omega=0): |K|/grad=%.1e |H|/grad=%.1e residual=%.1e decay=%.3f %.0fs;"
              " Im_c(c=4,m=10): omega=%.4f E=%.4f magkin=%.3f interior=%d bound fit K=%.4f %.0fs",
              kr, hr, a.residual_el, a.decay_delta, ta, m.omega, m.objective, m.magkin, !m.boundary_trapped, K, tm)};
}

Result strong_instability() {
  const Params p{1.0, 2.0};
  const GroundStateResult& gs = action_ground_state();
  EvolveConfig cfg;
  cfg.dt_initial = 5e-4;
  cfg.t_final = 1.0;
  cfg.record_stride = 20;
  cfg.order = 4;
  const InstabilityReport stay = instability_experiment(gs, p, 1.0, cfg);
  cfg.t_final = 6.0;
  cfg.order = 2;
  cfg.adapt = true;
  const InstabilityReport blow = instability_experiment(gs, p, 1.05, cfg);
  const bool ok = gs.scaling_second_deriv <= 0.0 && stay.modulus_drift < 1e-6 &&
                  stay.outcome.status == EvolveStatus::ReachedTFinal &&
                  blow.outcome.status == EvolveStatus::NumericalBlowUp && blow.membership_held;
  return {ok, fmt(" d2S=%.3f; lambda=1: |u| drift %.1e over t=1; lambda=1.05: %s at t=%.3f, membership %s over %zu "
                  "records, H <= 2(S-d) %s",
                  gs.scaling_second_deriv, stay.modulus_drift, to_string(blow.outcome.status).c_str(),
                  blow.outcome.t_end, blow.membership_held ? "held" : "failed", blow.membership.size(),
                  blow.key_inequality_held ? "held" : "failed")};
}

Result determinism() {
  const auto base = std::filesystem::temp_directory_path() / "magnls_acceptance_determinism";
  std::filesystem::remove_all(base);
  const int saved = thread_count();
  std::vector<std::string> verify, evolve_json, series;
  for (int n : {1, 4, 8}) {
    set_thread_count(n);
    ScenarioConfig v;
    v.command = "verify";
    v.seed = 7;
    v.samples = 50;
    v.grid = {32, 32, 32};
    v.out = (base / ("verify" + std::to_string(n))).string();
    run(v);
    verify.push_back(slurp(std::filesystem::path(v.out) / "verify.json"));
    ScenarioConfig e;
    e.command = "evolve";
    e.params = {1.0, 2.0};
    e.grid = {48, 48, 48};
    e.data.kind = "gaussian";
    e.data.amplitude = 1.2;
    e.data.widths = {1.0, 1.2, 1.1};
    e.data.chirp = 0.05;
    e.dt = 2e-3;
    e.t_final = 0.2;
    e.out = (base / ("evolve" + std::to_string(n))).string();
    run(e);
    evolve_json.push_back(slurp(std::filesystem::path(e.out) / "evolve.json"));
    series.push_back(slurp(std::filesystem::path(e.out) / "series.csv"));
  }
  set_thread_count(saved);
  std::filesystem::remove_all(base);
  auto same = [](const std::vector<std::string>& v) { return v[0] == v[1] && v[0] == v[2] && !v[0].empty(); };
  return {same(verify) && same(evolve_json) && same(series),
          fmt(" verify.json %s, evolve.json %s, series.csv %s across 1/4/8 threads", same(verify) ? "identical" : "DIFFERS",
              same(evolve_json) ? "identical" : "DIFFERS", same(series) ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"soliton constants", soliton_constants},
      {"identity suite", identity_suite},
      {"inequality suite", inequality_suite},
      {"conservation", conservation},
      {"virial consistency", virial_consistency},
      {"mass-critical dichotomy", mass_critical_dichotomy},
      {"supercritical dichotomy", supercritical_dichotomy},
      {"above-threshold blow-up", above_threshold},
      {"ground states", ground_states},
      {"strong instability", strong_instability},
      {"determinism", determinism},
  };
  std::set<int> which;
  for (int i = 1; i < argc; ++i) which.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!which.empty() && !which.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string(" exception: ") + e.what()};
    }
    all = all && r.pass;
    std::printf("[%s] criterion %2d %s (%.0fs):%s\n", r.pass ? "PASS" : "FAIL", id, criteria[i].first,
                seconds_since(t0), r.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
