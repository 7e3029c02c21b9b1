#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "magnls/dynamics.hpp"
#include "magnls/ground_states.hpp"
#include "magnls/grid.hpp"
#include "magnls/soliton.hpp"

namespace magnls {

/// Initial-data constructor. kind is one of scaled-soliton,
/// transverse-gaussian-bump, gaussian, cutoff-soliton, checkpoint.
struct DataSpec {
  std::string kind = "scaled-soliton";
  double a = 1.0;
  double lambda = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double c = 1.0;
  double amplitude = 1.0;
  std::array<double, 3> widths{1.0, 1.0, 1.0};
  double chirp = 0.0;
  std::string path;
};

struct ScenarioConfig {
  std::string command;
  Params params;
  std::array<int, 3> grid{64, 64, 64};
  std::array<double, 3> box{8.0, 8.0, 8.0};
  DataSpec data;
  double dt = 1e-3;
  double t_final = 1.0;
  bool adapt = false;
  int record_stride = 10;
  int order = 2;
  double blowup_grad_ratio = 2.0;
  double tail_fraction_max = 1e-6;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int samples = 1000;
  std::string out = "out";
  /// ground-state problem: action, I_c or Im_c.
  std::string problem = "action";
  double omega = 0.0;
  double c = 1.0;
  double m = 10.0;
  double lambda = 1.05;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
};

const std::vector<std::string>& scenario_commands();

/// alpha within 1e-3 of 4/3 is taken to mean exactly 4/3.
double normalize_alpha(double alpha);

EvolveConfig evolve_config(const ScenarioConfig& cfg);
Field build_initial_data(const DataSpec& spec, const Grid& grid, const Params& p, const RadialProfile* q);

/// Deterministic generator for sample `index` of a suite keyed by seed.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Random band-limited field: sum of 1 to 4 Gaussian packets well inside
/// the box.
Field random_field(const Grid& g, SampleRng& rng);

struct CheckStat {
  long violations = 0;
  double worst = 0.0;  ///< largest relative residual, or smallest relative margin
};

struct VerifyReport {
  std::uint64_t seed = 0;
  int samples = 0;
  double alpha = 0.0;
  std::map<std::string, CheckStat> identities;    ///< worst = max relative residual
  std::map<std::string, CheckStat> inequalities;  ///< worst = min relative margin
  std::map<std::string, double> identity_tolerance;
  bool passed() const;
  std::string to_json() const;
};

/// Identity and inequality suite on random fields. alpha selects the
/// supercritical power for the Gagliardo-Nirenberg and virial checks (2
/// when alpha is 4/3).
VerifyReport verify_suite(std::uint64_t seed, int samples, double alpha, const Grid& grid);

struct SuiteRun {
  explicit SuiteRun(EvolveOutcome o) : outcome(std::move(o)) {}
  std::string name;
  std::string verdict;
  EvolveOutcome outcome;
  std::map<std::string, double> numbers;
  std::map<std::string, bool> checks;
  bool passed() const;
};

struct DichotomySettings {
  std::array<int, 3> global_grid{64, 64, 64};
  std::array<double, 3> global_box{10.0, 10.0, 10.0};
  std::array<int, 3> blowup_grid{96, 96, 96};
  std::array<double, 3> blowup_box{8.0, 8.0, 8.0};
  double dt = 1e-3;
  double t_global = 5.0;
  double t_blowup = 3.0;
  bool include_above = true;
};

/// Default grids for the given power.
DichotomySettings default_dichotomy_settings(double alpha);

struct DichotomyReport {
  double alpha = 0.0;
  double b = 0.0;
  std::vector<SuiteRun> runs;
  bool passed() const;
  std::string to_json() const;
};

/// alpha = 4/3: mass ratio 0.9 and 1.2 scaled solitons. 4/3 < alpha < 4:
/// below-threshold sub- and super-gradient Gaussians, plus a chirped
/// above-threshold datum.
DichotomyReport dichotomy_suite(const Params& p, const RadialProfile& q, const DichotomySettings& s);

/// Runs one command and writes its artifacts under cfg.out. Returns the
/// process exit status (0 success, 3 when a suite's pass condition fails);
/// errors propagate as exceptions.
int run(const ScenarioConfig& cfg);

}  // namespace magnls
