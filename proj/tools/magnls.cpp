#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "magnls/errors.hpp"
#include "magnls/parallel.hpp"
#include "magnls/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw magnls::InvalidArgument("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic NLS experiments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  magnls::ScenarioConfig cfg;
  double alpha = 2.0, b = 1.0;
  std::vector<int> grid;
  std::vector<double> box, center, widths;
  std::string data_kind;

  const std::map<std::string, std::string> about{
      {"solve-q", "solve the radial soliton and report its constants"},
      {"verify", "check functional identities and inequalities on random fields"},
      {"classify", "decide global existence or blow-up for initial data"},
      {"evolve", "classify, then integrate the data in time"},
      {"ground-state", "compute a constrained minimizer or action ground state"},
      {"instability", "perturb an action ground state by dilation and evolve it"},
      {"dichotomy-suite", "run the global-existence / blow-up reference cases"},
  };
  for (const auto& name : magnls::scenario_commands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--alpha", alpha, "nonlinearity power");
    sub->add_option("--b", b, "magnetic field strength");
    sub->add_option("--grid", grid, "grid points n1,n2,n3")->delimiter(',')->expected(3);
    sub->add_option("--box", box, "box half-widths L1,L2,L3")->delimiter(',')->expected(3);
    sub->add_option("--dt", cfg.dt, "time step");
    sub->add_option("--t-final", cfg.t_final, "final time");
    sub->add_flag("--adapt", cfg.adapt, "adapt the time step to the solution scale");
    sub->add_option("--record-stride", cfg.record_stride, "steps between recorded diagnostics");
    sub->add_option("--order", cfg.order, "splitting order (2 or 4)");
    sub->add_option("--tol", cfg.tol, "solver tolerance");
    sub->add_option("--seed", cfg.seed, "seed for randomized suites");
    sub->add_option("--samples", cfg.samples, "samples for randomized suites");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--data", data_kind,
                    "initial data: scaled-soliton, transverse-gaussian-bump, gaussian, cutoff-soliton, checkpoint");
    sub->add_option("--a", cfg.data.a, "soliton amplitude factor");
    sub->add_option("--data-lambda", cfg.data.lambda, "initial data scale");
    sub->add_option("--center", center, "center x1,x2,x3")->delimiter(',')->expected(3);
    sub->add_option("--data-c", cfg.data.c, "initial data mass");
    sub->add_option("--amplitude", cfg.data.amplitude, "gaussian amplitude");
    sub->add_option("--widths", widths, "gaussian widths w1,w2,w3")->delimiter(',')->expected(3);
    sub->add_option("--chirp", cfg.data.chirp, "gaussian chirp");
    sub->add_option("--checkpoint", cfg.data.path, "checkpoint file for initial data");
    sub->add_option("--problem", cfg.problem, "ground-state problem: action, I_c, Im_c");
    sub->add_option("--omega", cfg.omega, "frequency");
    sub->add_option("--c", cfg.c, "mass constraint");
    sub->add_option("--m", cfg.m, "magnetic kinetic cap");
    sub->add_option("--lambda", cfg.lambda, "instability scaling factor");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    magnls::ScenarioConfig base;
    if (!config_path.empty()) base = magnls::ScenarioConfig::from_json(read_file(config_path));
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };
    base.command = sub->get_name();
    if (given("--alpha")) base.params.alpha = magnls::normalize_alpha(alpha);
    if (given("--b")) base.params.b = b;
    if (base.command == "verify" && config_path.empty() && !given("--grid")) base.grid = {32, 32, 32};
    if (given("--grid")) base.grid = {grid[0], grid[1], grid[2]};
    if (given("--box")) base.box = {box[0], box[1], box[2]};
    if (given("--dt")) base.dt = cfg.dt;
    if (given("--t-final")) base.t_final = cfg.t_final;
    if (given("--adapt")) base.adapt = cfg.adapt;
    if (given("--record-stride")) base.record_stride = cfg.record_stride;
    if (given("--order")) base.order = cfg.order;
    if (given("--tol")) base.tol = cfg.tol;
    if (given("--seed")) base.seed = cfg.seed;
    if (given("--samples")) base.samples = cfg.samples;
    if (given("--out")) base.out = cfg.out;
    if (given("--data")) base.data.kind = data_kind;
    if (given("--a")) base.data.a = cfg.data.a;
    if (given("--data-lambda")) base.data.lambda = cfg.data.lambda;
    if (given("--center")) base.data.center = {center[0], center[1], center[2]};
    if (given("--data-c")) base.data.c = cfg.data.c;
    if (given("--amplitude")) base.data.amplitude = cfg.data.amplitude;
    if (given("--widths")) base.data.widths = {widths[0], widths[1], widths[2]};
    if (given("--chirp")) base.data.chirp = cfg.data.chirp;
    if (given("--checkpoint")) {
      base.data.path = cfg.data.path;
      if (!given("--data")) base.data.kind = "checkpoint";
    }
    if (given("--problem")) base.problem = cfg.problem;
    if (given("--omega")) base.omega = cfg.omega;
    if (given("--c")) base.c = cfg.c;
    if (given("--m")) base.m = cfg.m;
    if (given("--lambda")) base.lambda = cfg.lambda;
    const int status = magnls::run(base);
    std::cout << "magnls " << base.command << ": " << (status == 0 ? "ok" : "failed") << ", reports in "
              << base.out << "\n";
    return status;
  } catch (const magnls::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const magnls::PreconditionRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const magnls::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
