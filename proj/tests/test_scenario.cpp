#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "magnls/checkpoint.hpp"
#include "magnls/errors.hpp"
#include "magnls/functionals.hpp"
#include "magnls/parallel.hpp"
#include "magnls/scenario.hpp"

using namespace magnls;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    ScenarioConfig::from_json(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config JSON round trip") {
  ScenarioConfig c;
  c.command = "evolve";
  c.params = {-0.5, 3.0};
  c.grid = {32, 48, 64};
  c.box = {6.0, 7.0, 8.0};
  c.data.kind = "gaussian";
  c.data.widths = {1.0, 1.5, 2.0};
  c.data.chirp = 0.25;
  c.seed = 12345678901234ULL;
  c.adapt = true;
  const ScenarioConfig d = ScenarioConfig::from_json(c.to_json());
  CHECK(d.to_json() == c.to_json());
  CHECK(d.seed == c.seed);
  CHECK(d.data.widths == c.data.widths);
}

TEST_CASE("malformed configs name the offending field") {
  CHECK(error_of(R"({"command":"verify","foo":1})").find("'foo'") != std::string::npos);
  CHECK(error_of(R"({"command":"verify","data":{"kind":"gaussian","bar":2}})").find("'data.bar'") !=
        std::string::npos);
  CHECK(error_of(R"({"command":"verify","grid":[7,8,8]})").find("'grid'") != std::string::npos);
  CHECK(error_of(R"({"command":"verify","alpha":"two"})").find("'alpha'") != std::string::npos);
  CHECK(error_of(R"({"command":"launch"})").find("'command'") != std::string::npos);
  CHECK(error_of(R"({"command":"evolve","data":{"kind":"checkpoint","path":"/no/such/file"}})")
            .find("'data.path'") != std::string::npos);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
  CHECK(error_of(R"({"command":"verify","b":0})").find("'b'") != std::string::npos);
}

TEST_CASE("alpha near 4/3 is snapped") {
  CHECK(normalize_alpha(1.3333) == 4.0 / 3.0);
  CHECK(normalize_alpha(1.34) == 1.34);
  CHECK(ScenarioConfig::from_json(R"({"command":"verify","alpha":1.3333})").params.alpha == 4.0 / 3.0);
}

TEST_CASE("sample generator is keyed by seed and index") {
  SampleRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const double x = a.uniform(0, 1);
  CHECK(x == b.uniform(0, 1));
  CHECK(x != c.uniform(0, 1));
  CHECK(x != d.uniform(0, 1));
  SampleRng e(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = e.uniform(-2.0, 3.0);
    CHECK(u >= -2.0);
    CHECK(u < 3.0);
  }
}

TEST_CASE("verify report is identical across thread counts") {
  const Grid g({32, 32, 32}, {8.0, 8.0, 8.0});
  const int saved = thread_count();
  set_thread_count(1);
  const std::string one = verify_suite(7, 8, 2.0, g).to_json();
  set_thread_count(4);
  const std::string four = verify_suite(7, 8, 2.0, g).to_json();
  set_thread_count(saved);
  CHECK(one == four);
  const auto j = nlohmann::json::parse(one);
  CHECK(j["passed"] == true);
  CHECK(j["identities"].size() == 4);
  CHECK(j["inequalities"].size() == 5);
  CHECK(verify_suite(8, 8, 2.0, g).to_json() != one);
}

TEST_CASE("initial data constructors") {
  const Params p{1.0, 2.0};
  const Grid g({48, 48, 48}, {8.0, 8.0, 8.0});
  DataSpec s;
  s.kind = "gaussian";
  s.amplitude = 1.0;
  s.widths = {1.2, 1.2, 1.2};
  s.chirp = 0.3;
  const Field f = build_initial_data(s, g, p, nullptr);
  CHECK(virial_Fprime(f) < 0.0);
  s.kind = "scaled-soliton";
  CHECK_THROWS_AS(build_initial_data(s, g, p, nullptr), InvalidArgument);
  const RadialProfile q = solve_q(4.0 / 3.0, 1e-10);
  const Field sol = build_initial_data(s, Grid({64, 64, 64}, {10.0, 10.0, 10.0}), {1.0, 4.0 / 3.0}, &q);
  CHECK(mass(sol) == doctest::Approx(q_constants(q).mass_Q).epsilon(1e-6));
  s.kind = "transverse-gaussian-bump";
  s.c = 2.0;
  CHECK(mass(build_initial_data(s, g, p, nullptr)) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("evolve command writes reports, series and final state") {
  const auto dir = std::filesystem::temp_directory_path() / "magnls_run_evolve";
  std::filesystem::remove_all(dir);
  ScenarioConfig c;
  c.command = "evolve";
  c.params = {1.0, 2.0};
  c.grid = {32, 32, 32};
  c.data.kind = "gaussian";
  c.data.amplitude = 0.5;
  c.data.widths = {1.2, 1.2, 1.2};
  c.dt = 1e-2;
  c.t_final = 0.2;
  c.record_stride = 5;
  c.out = dir.string();
  CHECK(run(c) == 0);
  for (const char* f : {"config.json", "classify.json", "evolve.json", "series.csv", "final.mnls"})
    CHECK(std::filesystem::exists(dir / f));
  const auto ev = nlohmann::json::parse(slurp(dir / "evolve.json"));
  CHECK(ev["status"] == "ReachedTFinal");
  const std::string csv = slurp(dir / "series.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(read_checkpoint((dir / "final.mnls").string()).t == doctest::Approx(0.2));
  const std::string first = slurp(dir / "evolve.json");
  CHECK(run(c) == 0);
  CHECK(slurp(dir / "evolve.json") == first);
  std::filesystem::remove_all(dir);
}

TEST_CASE("refused preconditions propagate") {
  ScenarioConfig c;
  c.command = "ground-state";
  c.problem = "I_c";
  c.params = {1.0, 3.0};
  c.grid = {32, 32, 32};
  c.out = (std::filesystem::temp_directory_path() / "magnls_run_refused").string();
  CHECK_THROWS_AS(run(c), PreconditionRefused);
  std::filesystem::remove_all(c.out);
}
