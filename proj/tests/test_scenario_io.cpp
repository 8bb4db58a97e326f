#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "sgne/bench.hpp"
#include "sgne/scenario_io.hpp"

using namespace sgne;

namespace {

const char* kTwoProsumerJson = R"({
  "prosumers": [
    {"a": -1.0, "c": 1.0, "d": 0.0, "D": 10.0, "p_min": -100.0, "p_max": 100.0},
    {"a": -1.0, "c": 1.0, "d": 0.0, "D": 0.0, "p_min": -100.0, "p_max": 100.0}
  ],
  "graph": {"edges": [[0, 1]]}
})";

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sgne_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal scenario parses with defaulted run settings") {
  const auto config = parse_scenario(kTwoProsumerJson);
  CHECK(config.instance.n() == 2);
  CHECK(config.instance.market.a[0] == -1.0);
  CHECK(config.instance.prosumers[0].D == 10.0);
  CHECK(config.instance.graph.edge_count() == 1);
  // defaults derived from the graph (path, deg_max 1)
  CHECK(config.step_sizes.gamma[0] == doctest::Approx(2.0));
  CHECK(config.step_sizes.sigma_z == doctest::Approx(1.0 / 3.0));
  CHECK(config.step_sizes.sigma_mu == doctest::Approx(1.0 / 4.0));
  CHECK(config.tolerances.step == 1e-8);
  CHECK(config.tolerances.consensus == 1e-6);
  CHECK(config.tolerances.kkt == 1e-6);
  CHECK(config.seed == 0);
}

TEST_CASE("explicit run settings override the defaults") {
  const std::string text = R"({
    "prosumers": [
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0},
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0},
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0}
    ],
    "graph": {"builtin": "cycle"},
    "step_sizes": {"gamma": [3.0, 4.0, 5.0], "sigma_z": 0.1, "sigma_mu": 0.05},
    "eta": 0.2,
    "tolerances": {"step": 1e-9, "consensus": 1e-7, "kkt": 1e-7},
    "seed": 17
  })";
  const auto config = parse_scenario(text);
  CHECK(config.step_sizes.gamma[1] == 4.0);
  CHECK(config.step_sizes.sigma_z == 0.1);
  CHECK(config.step_sizes.sigma_mu == 0.05);
  CHECK(config.step_sizes.eta == 0.2);
  CHECK(config.tolerances.step == 1e-9);
  CHECK(config.tolerances.kkt == 1e-7);
  CHECK(config.seed == 17);
}

TEST_CASE("scalar gamma broadcasts to all prosumers") {
  std::string text(kTwoProsumerJson);
  text.insert(text.rfind('}'), R"(, "step_sizes": {"gamma": 3.5})");
  const auto config = parse_scenario(text);
  CHECK(config.step_sizes.gamma[0] == 3.5);
  CHECK(config.step_sizes.gamma[1] == 3.5);
}

TEST_CASE("unknown keys are rejected with a field path") {
  std::string text(kTwoProsumerJson);
  text.insert(text.rfind('}'), R"(, "stepsizes": {})");
  CHECK_THROWS_WITH_AS(parse_scenario(text),
                       doctest::Contains("unknown key 'stepsizes'"),
                       InputError);
  const std::string bad_prosumer = R"({
    "prosumers": [
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0,
       "demand": 3},
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0}
    ],
    "graph": {"edges": [[0, 1]]}
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(bad_prosumer),
                       doctest::Contains("prosumers[0]"), InputError);
}

TEST_CASE("structural errors are rejected") {
  CHECK_THROWS_AS(parse_scenario("not json"), InputError);
  CHECK_THROWS_AS(parse_scenario("[1, 2]"), InputError);
  CHECK_THROWS_AS(parse_scenario(R"({"prosumers": []})"), InputError);
  // positive elasticity violates the model assumptions
  const std::string bad_a = R"({
    "prosumers": [
      {"a": 1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0},
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0}
    ],
    "graph": {"edges": [[0, 1]]}
  })";
  CHECK_THROWS_AS(parse_scenario(bad_a), InputError);
  // graph with both edges and builtin
  std::string both(kTwoProsumerJson);
  const auto pos = both.find(R"("edges": [[0, 1]])");
  both.insert(pos, R"("builtin": "path", )");
  CHECK_THROWS_AS(parse_scenario(both), InputError);
}

TEST_CASE("missing prosumer fields are named") {
  const std::string text = R"({
    "prosumers": [
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0},
      {"a": -1.0, "c": 1.0, "d": 0.0, "D": 1.0, "p_min": 0.0, "p_max": 5.0}
    ],
    "graph": {"edges": [[0, 1]]}
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("p_max"),
                       InputError);
}

TEST_CASE("canonical serialization round-trips") {
  const auto config = parse_scenario(kTwoProsumerJson);
  const std::string canon = canonical_scenario_json(config);
  const auto reparsed = parse_scenario(canon);
  CHECK(canonical_scenario_json(reparsed) == canon);
  CHECK(reparsed.instance.n() == 2);
  CHECK(reparsed.step_sizes.sigma_z == config.step_sizes.sigma_z);
}

TEST_CASE("scenario file loading") {
  TempDir tmp;
  const auto file = tmp.path / "scenario.json";
  {
    std::ofstream out(file);
    out << kTwoProsumerJson;
  }
  const auto config = load_scenario_file(file.string());
  CHECK(config.instance.n() == 2);
  CHECK_THROWS_AS(load_scenario_file((tmp.path / "missing.json").string()),
                  InputError);
}

TEST_CASE("builtin scenarios") {
  CHECK(is_builtin_scenario("three_stage1"));
  CHECK(is_builtin_scenario("ieee123"));
  CHECK(!is_builtin_scenario("nope"));
  CHECK_THROWS_AS(builtin_scenario("nope"), InputError);

  const auto stage1 = builtin_scenario("three_stage1");
  CHECK(stage1.instance.n() == 3);
  CHECK(stage1.instance.prosumers[0].D == 730.0);
  CHECK(stage1.instance.prosumers[1].D == 365.0);
  CHECK(stage1.instance.graph.edge_count() == 3);

  const auto stage2 = builtin_scenario("three_stage2");
  CHECK(stage2.instance.prosumers[1].D == 0.0);

  const auto ieee = builtin_scenario("ieee123");
  CHECK(ieee.instance.n() == 123);
  CHECK(ieee.instance.graph.edge_count() == 122);
  CHECK(ieee.instance.graph.is_connected());
  CHECK(ieee.instance.satisfies_capacity_assumption());
}

TEST_CASE("trace csv layout") {
  TempDir tmp;
  const auto file = tmp.path / "trace.csv";
  std::vector<TraceRow> trace(2);
  trace[0] = {1, 0.5, 0.25, 0.125, -1.0};
  trace[1] = {2, 0.25, 0.2, 0.1, 0.05};
  write_trace_csv(file.string(), trace);
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,res_step,res_kkt,consensus_gap,rel_err");
  std::getline(in, line);
  CHECK(line == "1,0.5,0.25,0.125,-1");
  int rows = 1;
  while (std::getline(in, line) && !line.empty()) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("report json layout") {
  TempDir tmp;
  const auto file = tmp.path / "report.json";
  const auto config = parse_scenario(kTwoProsumerJson);
  auto report = run_sgne(config.instance, config.step_sizes);
  write_report_json(file.string(), report, "sgne");
  std::ifstream in(file);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"method\": \"sgne\"") != std::string::npos);
  CHECK(text.find("\"converged\": true") != std::string::npos);
  CHECK(text.find("\"mu_c\"") != std::string::npos);
  CHECK(text.find("\"residuals\"") != std::string::npos);
}

TEST_CASE("verify_scenario passes every property on the hand case") {
  const auto config = parse_scenario(kTwoProsumerJson);
  const auto results = verify_scenario(config, 7);
  CHECK(results.size() >= 6);
  for (const auto& result : results) {
    INFO(result.name, ": ", result.detail);
    CHECK(result.passed);
  }
}

TEST_CASE("eta sweep reports nonincreasing iteration counts on stage 1") {
  auto config = builtin_scenario("three_stage1");
  const auto rows = eta_sweep(config, {0.0, 0.2}, 100000, 0.01);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].converged);
  CHECK(rows[1].converged);
  CHECK(rows[1].iterations <= rows[0].iterations);
}
