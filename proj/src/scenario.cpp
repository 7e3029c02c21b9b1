#include "magnls/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "magnls/checkpoint.hpp"
#include "magnls/classify.hpp"
#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/initial_data.hpp"
#include "magnls/spectral.hpp"

namespace magnls {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void write_series_csv(const std::filesystem::path& path, const EvolveOutcome& o) {
  std::string text = diagnostics_csv_header() + ",tail_fraction,dt\r\n";
  for (std::size_t i = 0; i < o.series.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g", o.tail_fractions[i], o.dts[i]);
    text += diagnostics_csv_row(o.series[i]) + buf + "\r\n";
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

json outcome_json(const EvolveOutcome& o) {
  json j;
  j["status"] = to_string(o.status);
  j["t_end"] = o.t_end;
  j["steps"] = o.steps;
  j["records"] = o.series.size();
  j["final_finite"] = o.final_finite;
  j["blowup_time_estimate"] = o.blowup_time_estimate ? num(*o.blowup_time_estimate) : json(nullptr);
  j["message"] = o.message;
  if (!o.series.empty()) {
    const auto& a = o.series.front();
    const auto& b = o.series.back();
    auto rel = [](double x, double y, double s) { return std::abs(y - x) / std::max(std::abs(s), 1e-300); };
    j["drift"] = {{"mass", num(rel(a.mass, b.mass, a.mass))},
                  {"E", num(rel(a.energy_E, b.energy_E, a.energy_E))},
                  {"R", num(rel(a.angular_R, b.angular_R, std::max(std::abs(a.angular_R), a.mass)))}};
  }
  return j;
}

template <class T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("config: field '") + key + "' has the wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InvalidArgument("config: unknown field '" + where + k + "'");
}

}  // namespace

const std::vector<std::string>& scenario_commands() {
  static const std::vector<std::string> cmds{"solve-q", "verify", "classify", "evolve",
                                             "ground-state", "instability", "dichotomy-suite"};
  return cmds;
}

double normalize_alpha(double alpha) {
  return std::abs(alpha - 4.0 / 3.0) < 1e-3 ? 4.0 / 3.0 : alpha;
}

void ScenarioConfig::validate() const {
  const auto& cmds = scenario_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw InvalidArgument("config: field 'command' must be one of solve-q, verify, classify, evolve, "
                          "ground-state, instability, dichotomy-suite");
  if (!(params.alpha > 0.0 && params.alpha < 4.0)) throw InvalidArgument("config: field 'alpha' must lie in (0,4)");
  if (!(params.b != 0.0) || !std::isfinite(params.b)) throw InvalidArgument("config: field 'b' must be nonzero");
  for (int n : grid)
    if (n < 8 || n % 2 != 0) throw InvalidArgument("config: field 'grid' needs even sizes >= 8");
  for (double L : box)
    if (!(L > 0.0)) throw InvalidArgument("config: field 'box' needs positive half-widths");
  if (!(dt > 0.0)) throw InvalidArgument("config: field 'dt' must be positive");
  if (!(t_final > 0.0)) throw InvalidArgument("config: field 't_final' must be positive");
  if (record_stride < 1) throw InvalidArgument("config: field 'record_stride' must be >= 1");
  if (order != 2 && order != 4) throw InvalidArgument("config: field 'order' must be 2 or 4");
  if (!(blowup_grad_ratio > 1.0)) throw InvalidArgument("config: field 'blowup_grad_ratio' must exceed 1");
  if (!(tail_fraction_max > 0.0 && tail_fraction_max < 1.0))
    throw InvalidArgument("config: field 'tail_fraction_max' must lie in (0,1)");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("config: field 'tol' must lie in (0,1)");
  if (samples < 1) throw InvalidArgument("config: field 'samples' must be >= 1");
  if (out.empty()) throw InvalidArgument("config: field 'out' must not be empty");
  if (problem != "action" && problem != "I_c" && problem != "Im_c")
    throw InvalidArgument("config: field 'problem' must be action, I_c or Im_c");
  if (!(lambda > 0.0)) throw InvalidArgument("config: field 'lambda' must be positive");
  if (!(c > 0.0)) throw InvalidArgument("config: field 'c' must be positive");
  if (!(m > 0.0)) throw InvalidArgument("config: field 'm' must be positive");
  const std::set<std::string> kinds{"scaled-soliton", "transverse-gaussian-bump", "gaussian", "cutoff-soliton",
                                    "checkpoint"};
  if (!kinds.count(data.kind))
    throw InvalidArgument("config: field 'data.kind' must be one of scaled-soliton, transverse-gaussian-bump, "
                          "gaussian, cutoff-soliton, checkpoint");
  if (!(data.lambda > 0.0)) throw InvalidArgument("config: field 'data.lambda' must be positive");
  if (!(data.c > 0.0)) throw InvalidArgument("config: field 'data.c' must be positive");
  for (double w : data.widths)
    if (!(w > 0.0)) throw InvalidArgument("config: field 'data.widths' must be positive");
  if (data.kind == "checkpoint" && !std::filesystem::exists(data.path))
    throw InvalidArgument("config: field 'data.path' does not name an existing file");
}

std::string ScenarioConfig::to_json() const {
  json j;
  j["command"] = command;
  j["alpha"] = params.alpha;
  j["b"] = params.b;
  j["grid"] = grid;
  j["box"] = box;
  j["data"] = {{"kind", data.kind},   {"a", data.a},         {"lambda", data.lambda},
               {"center", data.center}, {"c", data.c},     {"amplitude", data.amplitude},
               {"widths", data.widths}, {"chirp", data.chirp}, {"path", data.path}};
  j["dt"] = dt;
  j["t_final"] = t_final;
  j["adapt"] = adapt;
  j["record_stride"] = record_stride;
  j["order"] = order;
  j["blowup_grad_ratio"] = blowup_grad_ratio;
  j["tail_fraction_max"] = tail_fraction_max;
  j["tol"] = tol;
  j["seed"] = seed;
  j["samples"] = samples;
  j["out"] = out;
  j["problem"] = problem;
  j["omega"] = omega;
  j["c"] = c;
  j["m"] = m;
  j["lambda"] = lambda;
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  check_keys(j,
             {"command", "alpha", "b", "grid", "box", "data", "dt", "t_final", "adapt", "record_stride", "order",
              "blowup_grad_ratio", "tail_fraction_max", "tol", "seed", "samples", "out", "problem", "omega", "c",
              "m", "lambda"},
             "");
  ScenarioConfig c;
  c.command = get(j, "command", c.command);
  c.params.alpha = normalize_alpha(get(j, "alpha", c.params.alpha));
  c.params.b = get(j, "b", c.params.b);
  c.grid = get(j, "grid", c.grid);
  c.box = get(j, "box", c.box);
  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, {"kind", "a", "lambda", "center", "c", "amplitude", "widths", "chirp", "path"}, "data.");
    c.data.kind = get(d, "kind", c.data.kind);
    c.data.a = get(d, "a", c.data.a);
    c.data.lambda = get(d, "lambda", c.data.lambda);
    c.data.center = get(d, "center", c.data.center);
    c.data.c = get(d, "c", c.data.c);
    c.data.amplitude = get(d, "amplitude", c.data.amplitude);
    c.data.widths = get(d, "widths", c.data.widths);
    c.data.chirp = get(d, "chirp", c.data.chirp);
    c.data.path = get(d, "path", c.data.path);
  }
  c.dt = get(j, "dt", c.dt);
  c.t_final = get(j, "t_final", c.t_final);
  c.adapt = get(j, "adapt", c.adapt);
  c.record_stride = get(j, "record_stride", c.record_stride);
  c.order = get(j, "order", c.order);
  c.blowup_grad_ratio = get(j, "blowup_grad_ratio", c.blowup_grad_ratio);
  c.tail_fraction_max = get(j, "tail_fraction_max", c.tail_fraction_max);
  c.tol = get(j, "tol", c.tol);
  c.seed = get(j, "seed", c.seed);
  c.samples = get(j, "samples", c.samples);
  c.out = get(j, "out", c.out);
  c.problem = get(j, "problem", c.problem);
  c.omega = get(j, "omega", c.omega);
  c.c = get(j, "c", c.c);
  c.m = get(j, "m", c.m);
  c.lambda = get(j, "lambda", c.lambda);
  c.validate();
  return c;
}

EvolveConfig evolve_config(const ScenarioConfig& cfg) {
  EvolveConfig e;
  e.dt_initial = cfg.dt;
  e.t_final = cfg.t_final;
  e.adapt = cfg.adapt;
  e.record_stride = cfg.record_stride;
  e.order = cfg.order;
  e.blowup_grad_ratio = cfg.blowup_grad_ratio;
  e.tail_fraction_max = cfg.tail_fraction_max;
  return e;
}

Field build_initial_data(const DataSpec& spec, const Grid& grid, const Params& p, const RadialProfile* q) {
  auto need_q = [&]() -> const RadialProfile& {
    if (!q) throw InvalidArgument("initial data: " + spec.kind + " needs the soliton profile");
    return *q;
  };
  if (spec.kind == "scaled-soliton") return scaled_soliton(need_q(), grid, {spec.a, spec.lambda, spec.center});
  if (spec.kind == "transverse-gaussian-bump") return transverse_bump(grid, p, {spec.c, spec.lambda});
  if (spec.kind == "gaussian") return gaussian(grid, {spec.amplitude, spec.widths, spec.chirp, spec.center});
  if (spec.kind == "cutoff-soliton") return cutoff_soliton(need_q(), grid, {spec.c, spec.lambda, 0.0, 0.0});
  if (spec.kind == "checkpoint") {
    Checkpoint ck = read_checkpoint(spec.path);
    if (!(ck.field.grid() == grid)) throw InvalidArgument("initial data: checkpoint grid differs from the configured grid");
    return std::move(ck.field);
  }
  throw InvalidArgument("initial data: unknown kind '" + spec.kind + "'");
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double SampleRng::uniform(double lo, double hi) {
  // 53 random bits; std::uniform_real_distribution is not reproducible across
  // standard libraries.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Field random_field(const Grid& g, SampleRng& rng) {
  const int packets = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
  struct Packet {
    complex amp;
    std::array<double, 3> c, w, k;
  };
  std::vector<Packet> ps;
  for (int i = 0; i < packets; ++i) {
    Packet pk;
    pk.amp = std::polar(rng.uniform(0.3, 1.5), rng.uniform(0.0, 2.0 * std::numbers::pi));
    for (int j = 0; j < 3; ++j) {
      pk.c[j] = rng.uniform(-0.2, 0.2) * g.half_width(j);
      pk.w[j] = rng.uniform(0.9, 1.5);
      pk.k[j] = rng.uniform(-1.5, 1.5);
    }
    ps.push_back(pk);
  }
  Field f(g);
  for (int i0 = 0; i0 < g.n(0); ++i0)
    for (int i1 = 0; i1 < g.n(1); ++i1)
      for (int i2 = 0; i2 < g.n(2); ++i2) {
        const std::array<double, 3> x{g.coord(0, i0), g.coord(1, i1), g.coord(2, i2)};
        complex v = 0.0;
        for (const auto& pk : ps) {
          double e = 0.0, ph = 0.0;
          for (int j = 0; j < 3; ++j) {
            const double d = (x[j] - pk.c[j]) / pk.w[j];
            e += d * d;
            ph += pk.k[j] * x[j];
          }
          v += pk.amp * std::polar(std::exp(-0.5 * e), ph);
        }
        f[g.index(i0, i1, i2)] = v;
      }
  return f;
}

bool VerifyReport::passed() const {
  for (const auto& [k, s] : identities)
    if (s.violations) return false;
  for (const auto& [k, s] : inequalities)
    if (s.violations) return false;
  return true;
}

std::string VerifyReport::to_json() const {
  json j;
  j["seed"] = seed;
  j["samples"] = samples;
  j["alpha"] = alpha;
  json id = json::object(), iq = json::object();
  for (const auto& [k, s] : identities)
    id[k] = {{"violations", s.violations}, {"max_relative_residual", num(s.worst)},
             {"tolerance", num(identity_tolerance.at(k))}};
  for (const auto& [k, s] : inequalities)
    iq[k] = {{"violations", s.violations}, {"min_relative_margin", num(s.worst)}};
  j["identities"] = id;
  j["inequalities"] = iq;
  j["passed"] = passed();
  return j.dump(2);
}

VerifyReport verify_suite(std::uint64_t seed, int samples, double alpha, const Grid& grid) {
  if (samples < 1) throw InvalidArgument("verify: samples must be >= 1");
  const double a = is_mass_critical(alpha) || alpha <= 4.0 / 3.0 ? 2.0 : alpha;
  const QConstants qs = q_constants(solve_q(a, 1e-10));
  const QConstants qm = q_constants(solve_q(4.0 / 3.0, 1e-10));
  VerifyReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.alpha = a;
  rep.identity_tolerance = {{"mag_norm", 1e-10}, {"hamiltonian_form", 1e-10}, {"energy_split", 1e-9},
                            {"virial_pohozaev", 1e-10}};
  for (const auto& [k, t] : rep.identity_tolerance) rep.identities[k].worst = 0.0;
  for (const char* k : {"diamagnetic", "b_bound", "gn_mass_critical", "gn_supercritical", "cs_virial"})
    rep.inequalities[k].worst = std::numeric_limits<double>::infinity();

  auto identity = [&](const char* name, double resid) {
    auto& s = rep.identities[name];
    s.worst = std::max(s.worst, resid);
    if (!(resid < rep.identity_tolerance.at(name))) ++s.violations;
  };
  auto inequality = [&](const char* name, double margin) {
    auto& s = rep.inequalities[name];
    s.worst = std::min(s.worst, margin);
    if (!(margin >= 0.0)) ++s.violations;
  };

  for (int i = 0; i < samples; ++i) {
    SampleRng rng(seed, static_cast<std::uint64_t>(i));
    const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    const Params p{sign * rng.uniform(0.3, 2.0), a};
    const Field f = random_field(grid, rng);
    const double dv = grid.cell_volume();

    const Integrals in = compute_integrals(f, p);
    const MagneticKinetic mk = magnetic_kinetic_parts(f, p);
    identity("mag_norm", mk.residual());
    const Field hf = apply_magnetic_hamiltonian(f, p);
    const double hform = reduce_sum(f.size(), [&](std::size_t k) { return (hf[k] * std::conj(f[k])).real(); }) * dv;
    identity("hamiltonian_form", std::abs(hform - in.magkin) / in.magkin);

    const double E = energy_E(f, p), E0 = energy_E0(f, p), R = angular_momentum(f);
    identity("energy_split", std::abs(E - (E0 + 0.5 * p.b * R)) /
                                 (0.5 * in.magkin + 0.5 * std::abs(p.b * R) + in.lp / (a + 2.0)));
    const double H = pohozaev_H(f, p), F2 = virial_Fsecond(f, p);
    identity("virial_pohozaev", std::abs(8.0 * H - F2) /
                                    (8.0 * in.grad_sq + 2.0 * p.b * p.b * in.rho_sq + 12.0 * a / (a + 2.0) * in.lp));

    // Pointwise diamagnetic inequality |grad|f|| <= |(grad+iA)f|, with
    // grad|f| = Re(conj(f) grad f)/|f|.
    const auto cov = covariant_gradient(f, p);
    long bad = 0;
    double lhs_sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double m2 = std::norm(f[k]);
      if (m2 == 0.0) continue;
      double l = 0.0, r = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double g = (std::conj(f[k]) * cov[j][k]).real();
        l += g * g / m2;
        r += std::norm(cov[j][k]);
      }
      lhs_sum += l;
      if (l > r * (1.0 + 1e-12)) ++bad;
    }
    inequality("diamagnetic", bad ? -1.0 : (in.magkin - lhs_sum * dv) / in.magkin);
    inequality("b_bound", (in.magkin - std::abs(p.b) * in.mass) / in.magkin);

    const Params pc{p.b, 4.0 / 3.0};
    const double lpm = lp_norm(f, pc.alpha);
    const double rhs_m = 5.0 / 3.0 * std::pow(in.mass / qm.mass_Q, 2.0 / 3.0) * in.magkin;
    inequality("gn_mass_critical", 1.0 - lpm / rhs_m);
    const double rhs_s = qs.c_opt * std::pow(in.magkin, 0.75 * a) * std::pow(in.mass, (4.0 - a) / 4.0);
    inequality("gn_supercritical", 1.0 - in.lp / rhs_s);
    inequality("cs_virial", cs_virial_gap(f, qs.c_opt, p) / (in.x_sq * in.grad_sq));
  }
  return rep;
}

bool SuiteRun::passed() const {
  for (const auto& [k, v] : checks)
    if (!v) return false;
  return true;
}

bool DichotomyReport::passed() const {
  for (const auto& r : runs)
    if (!r.passed()) return false;
  return !runs.empty();
}

std::string DichotomyReport::to_json() const {
  json j;
  j["alpha"] = alpha;
  j["b"] = b;
  json rs = json::array();
  for (const auto& r : runs) {
    json x;
    x["name"] = r.name;
    x["verdict"] = r.verdict;
    x["outcome"] = outcome_json(r.outcome);
    json n = json::object();
    for (const auto& [k, v] : r.numbers) n[k] = num(v);
    x["numbers"] = n;
    x["checks"] = r.checks;
    x["passed"] = r.passed();
    rs.push_back(x);
  }
  j["runs"] = rs;
  j["passed"] = passed();
  return j.dump(2);
}

DichotomySettings default_dichotomy_settings(double alpha) {
  DichotomySettings s;
  if (!is_mass_critical(alpha)) {
    s.global_box = {8.0, 8.0, 8.0};
    s.blowup_box = {6.0, 6.0, 6.0};
  }
  return s;
}

namespace {

SuiteRun run_case(const std::string& name, const Field& u0, const Params& p, const QConstants& qc,
                  const Grid& g, double dt, double t_final) {
  (void)g;
  const ClassificationReport cls = classify(u0, p, qc);
  EvolveConfig cfg;
  cfg.dt_initial = dt;
  cfg.t_final = t_final;
  cfg.adapt = true;
  SuiteRun r(evolve(u0, p, cfg));
  r.name = name;
  r.verdict = to_string(cls.verdict);
  for (const char* k : {"M", "E", "E0", "F", "Fprime", "grad_sq", "magkin_sq", "lp"})
    if (cls.quantities.count(k)) r.numbers[k] = cls.quantities.at(k);
  r.checks["verdict_matches_outcome"] =
      predicts_blowup(cls.verdict) ? r.outcome.status == EvolveStatus::NumericalBlowUp
                                   : predicts_global(cls.verdict) && r.outcome.status == EvolveStatus::ReachedTFinal;
  return r;
}

Field gaussian_with(const Grid& g, double amp, double w, double chirp) {
  return gaussian(g, GaussianSpec{amp, {w, w, w}, chirp, {0.0, 0.0, 0.0}});
}

}  // namespace

DichotomyReport dichotomy_suite(const Params& p, const RadialProfile& q, const DichotomySettings& s) {
  p.validate();
  const QConstants qc = q_constants(q);
  if (std::abs(qc.alpha - p.alpha) > 1e-12) throw InvalidArgument("dichotomy: profile does not match alpha");
  DichotomyReport rep;
  rep.alpha = p.alpha;
  rep.b = p.b;
  const Grid gg(s.global_grid, s.global_box);
  const Grid gb(s.blowup_grid, s.blowup_box);

  if (is_mass_critical(p.alpha)) {
    {
      const double a = 0.9;
      const Field u0 = scaled_soliton(q, gg, {a, 1.0, {0.0, 0.0, 0.0}});
      SuiteRun r = run_case("mass_ratio_0.9", u0, p, qc, gg, 2.0 * s.dt, s.t_global);
      const double ratio = std::sqrt(mass(u0) / qc.mass_Q);
      const double cap = 2.0 * energy_E(u0, p) / (1.0 - std::pow(ratio, 4.0 / 3.0));
      double worst = 0.0;
      for (const auto& rec : r.outcome.series) worst = std::max(worst, rec.mag_kinetic_sq);
      r.numbers["mass_ratio"] = ratio;
      r.numbers["magkin_cap"] = cap;
      r.numbers["max_magkin"] = worst;
      r.checks["reached_t_final"] = r.outcome.status == EvolveStatus::ReachedTFinal;
      r.checks["magkin_below_cap"] = worst < cap;
      rep.runs.push_back(std::move(r));
    }
    {
      const double a = 1.2;
      // E0(a lambda^{3/2} Q(lambda x)) < 0 once
      // lambda^4 > (b^2/8) ||rho Q||^2 / ((3/10)(a^{4/3}-1) ||Q||^{10/3}).
      const double l4 = p.b * p.b / 8.0 * qc.rho_Q_sq / (0.3 * (std::pow(a, 4.0 / 3.0) - 1.0) * qc.lp_Q);
      const double lam = std::max(1.0, 1.3 * std::pow(l4, 0.25));
      const Field u0 = scaled_soliton(q, gb, {a, lam, {0.0, 0.0, 0.0}});
      SuiteRun r = run_case("mass_ratio_1.2", u0, p, qc, gb, s.dt, s.t_blowup);
      const Integrals in = compute_integrals(u0, p);
      const double E0 = energy_E0(u0, p);
      const double root = virial_parabola_root(in.x_sq, 4.0 * in.x_dot_grad_im, E0);
      r.numbers["lambda"] = lam;
      r.numbers["mass_ratio"] = std::sqrt(in.mass / qc.mass_Q);
      r.numbers["virial_parabola_root"] = root;
      r.checks["E0_negative"] = E0 < 0.0;
      r.checks["numerical_blowup"] = r.outcome.status == EvolveStatus::NumericalBlowUp;
      r.checks["blowup_before_virial_bound"] = r.outcome.t_end <= 1.2 * root;
      rep.runs.push_back(std::move(r));
    }
    return rep;
  }

  if (!(p.alpha > 4.0 / 3.0)) throw PreconditionRefused("dichotomy: requires alpha >= 4/3");
  const double sc = qc.sigma_c;
  const double gq = qc.grad_mass_product;
  auto grad_product = [&](const Field& f) {
    return std::sqrt(gradient_sq(f)) * std::pow(mass(f), 0.5 * sc);
  };
  auto e_product = [&](const Field& f) { return energy_E0(f, p) * std::pow(mass(f), sc); };
  {
    // ||grad f|| ||f||^sc scales as amp^{1+sc}.
    const double w = 1.2;
    const double unit = grad_product(gaussian_with(gg, 1.0, w, 0.0));
    const double amp = std::pow(0.5 * gq / unit, 1.0 / (1.0 + sc));
    const Field u0 = gaussian_with(gg, amp, w, 0.0);
    SuiteRun r = run_case("below_sub_gradient", u0, p, qc, gg, 2.0 * s.dt, s.t_global);
    double worst = 0.0;
    for (const auto& rec : r.outcome.series)
      worst = std::max(worst, std::sqrt(rec.grad_norm_sq) * std::pow(rec.mass, 0.5 * sc) / gq);
    r.numbers["energy_ratio"] = e_product(u0) / qc.e0_mq;
    r.numbers["max_gradient_ratio"] = worst;
    r.checks["below_threshold"] = e_product(u0) < qc.e0_mq;
    r.checks["stays_sub_gradient"] = worst < 1.0;
    r.checks["reached_t_final"] = r.outcome.status == EvolveStatus::ReachedTFinal;
    rep.runs.push_back(std::move(r));
  }
  // Heavy Gaussian on the decreasing branch of amp -> E0 M^sc, tuned to half
  // the threshold.
  const double w = 1.05;
  double lo = 0.1, hi = 0.1;
  while (energy_E0(gaussian_with(gb, hi, w, 0.0), p) > 0.0) {
    lo = hi;
    hi *= 1.05;
    if (hi > 1e3) throw NumericalFailure("dichotomy: no negative-energy Gaussian amplitude found");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (e_product(gaussian_with(gb, mid, w, 0.0)) > 0.5 * qc.e0_mq ? lo : hi) = mid;
  }
  const double amp = lo;
  {
    const Field u0 = gaussian_with(gb, amp, w, 0.0);
    SuiteRun r = run_case("below_super_gradient", u0, p, qc, gb, s.dt, s.t_blowup);
    r.numbers["energy_ratio"] = e_product(u0) / qc.e0_mq;
    r.numbers["gradient_ratio"] = grad_product(u0) / gq;
    r.checks["below_threshold"] = e_product(u0) < qc.e0_mq && energy_E0(u0, p) >= 0.0;
    r.checks["super_gradient"] = grad_product(u0) > gq;
    r.checks["numerical_blowup"] = r.outcome.status == EvolveStatus::NumericalBlowUp;
    rep.runs.push_back(std::move(r));
  }
  if (s.include_above) {
    const Field g0 = gaussian_with(gb, amp, w, 0.0);
    // A chirp e^{-i mu |x|^2} adds 2 mu^2 ||x g||^2 to E0; 1.5x the amount
    // needed to reach the threshold.
    const double need = qc.e0_mq / std::pow(mass(g0), sc) - energy_E0(g0, p);
    const double mu = 1.5 * std::sqrt(std::max(need, 0.0) / (2.0 * virial_F(g0)));
    const Field u0 = gaussian_with(gb, amp, w, mu);
    SuiteRun r = run_case("above_threshold_chirped", u0, p, qc, gb, s.dt, s.t_blowup);
    const ClassificationReport ab = classify_above(u0, p, qc);
    r.numbers["chirp"] = mu;
    r.numbers["lambda0"] = ab.quantities.at("lambda0");
    r.numbers["lambda0_implicit_residual"] = ab.quantities.at("lambda0_implicit_residual");
    for (const char* k : {"above1_energy", "above2_virial_ratio", "above3_lp", "above4_Im_x_grad"}) {
      r.checks[k] = ab.evidence.at(k).holds;
      r.numbers[std::string(k) + "_margin"] = ab.evidence.at(k).margin;
    }
    r.checks["lambda0_cross_check"] = std::abs(ab.quantities.at("lambda0_implicit_residual")) < 1e-9;
    r.checks["formulations_agree"] = ab.quantities.at("formulations_agree") == 1.0;
    r.checks["numerical_blowup"] = r.outcome.status == EvolveStatus::NumericalBlowUp;
    rep.runs.push_back(std::move(r));
  }
  return rep;
}

int run(const ScenarioConfig& cfg) {
  cfg.validate();
  const Params& p = cfg.params;
  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);
  write_text(out / "config.json", cfg.to_json());
  const Grid grid(cfg.grid, cfg.box);

  auto profile = [&] { return load_or_solve_q(cfg.out, p.alpha, cfg.tol); };
  auto needs_q = [&] {
    return cfg.data.kind == "scaled-soliton" || cfg.data.kind == "cutoff-soliton" || cfg.command == "classify" ||
           cfg.command == "evolve";
  };

  if (cfg.command == "solve-q") {
    const RadialProfile q = profile();
    const QConstants qc = q_constants(q);
    json j = json::parse(profile_to_json(q, qc));
    for (const char* k : {"nodes", "values", "derivatives"}) j.erase(k);
    write_text(out / "solve_q.json", j.dump(2));
    return 0;
  }
  if (cfg.command == "verify") {
    const VerifyReport rep = verify_suite(cfg.seed, cfg.samples, p.alpha, grid);
    write_text(out / "verify.json", rep.to_json());
    return rep.passed() ? 0 : 3;
  }
  if (cfg.command == "classify" || cfg.command == "evolve") {
    std::optional<RadialProfile> q;
    if (needs_q() && p.alpha >= 4.0 / 3.0 - 1e-12) q = profile();
    const Field u0 = build_initial_data(cfg.data, grid, p, q ? &*q : nullptr);
    std::optional<ClassificationReport> cls;
    if (q) {
      cls = classify(u0, p, q_constants(*q));
      write_text(out / "classify.json", cls->to_json());
    }
    if (cfg.command == "classify") return 0;
    const EvolveOutcome o = evolve(u0, p, evolve_config(cfg));
    write_series_csv(out / "series.csv", o);
    json j = outcome_json(o);
    if (cls) j["verdict"] = to_string(cls->verdict);
    write_text(out / "evolve.json", j.dump(2));
    write_checkpoint((out / "final.mnls").string(), o.final_state, p, o.t_end);
    return 0;
  }
  if (cfg.command == "ground-state") {
    DescentConfig dc;
    std::optional<GroundStateResult> gs;
    if (cfg.problem == "action") {
      gs.emplace(minimize_action(cfg.omega, p, grid, cfg.tol, std::nullopt, dc));
    } else if (cfg.problem == "I_c") {
      std::optional<QConstants> qc;
      if (is_mass_critical(p.alpha)) qc = q_constants(profile());
      gs.emplace(minimize_I_c(cfg.c, p, grid, cfg.tol, qc ? &*qc : nullptr, dc));
    } else {
      gs.emplace(minimize_Im_c(cfg.c, cfg.m, p, grid, cfg.tol, std::nullopt, dc));
    }
    write_ground_state(cfg.out, "ground_state", *gs, p);
    return 0;
  }
  if (cfg.command == "instability") {
    const GroundStateResult gs = minimize_action(cfg.omega, p, grid, cfg.tol);
    write_ground_state(cfg.out, "ground_state", gs, p);
    const InstabilityReport rep = instability_experiment(gs, p, cfg.lambda, evolve_config(cfg));
    write_series_csv(out / "series.csv", rep.outcome);
    write_text(out / "instability.json", rep.to_json());
    return 0;
  }
  if (cfg.command == "dichotomy-suite") {
    const RadialProfile q = profile();
    DichotomySettings s = default_dichotomy_settings(p.alpha);
    s.dt = cfg.dt;
    const DichotomyReport rep = dichotomy_suite(p, q, s);
    write_text(out / "dichotomy.json", rep.to_json());
    for (const auto& r : rep.runs) write_series_csv(out / (r.name + ".csv"), r.outcome);
    return rep.passed() ? 0 : 3;
  }
  throw InvalidArgument("config: unknown command '" + cfg.command + "'");
}

}  // namespace magnls
