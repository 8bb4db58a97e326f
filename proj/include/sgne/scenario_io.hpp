#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sgne/dist_runtime.hpp"
#include "sgne/market_game.hpp"

namespace sgne {

/// A scenario file plus the run settings it carries.
struct ScenarioConfig {
  ScenarioInstance instance;
  StepSizes step_sizes;       // defaults filled from the graph
  StopTolerances tolerances;  // defaults unless overridden
  unsigned long seed = 0;
};

/// Parses the JSON scenario schema. Unknown keys are rejected with a
/// field-path diagnostic wrapped in InputError.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Canonical key-sorted serialization; parse + serialize is idempotent.
std::string canonical_scenario_json(const ScenarioConfig& config);

/// Built-in scenarios: "three_stage1", "three_stage2", "ieee123".
bool is_builtin_scenario(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

/// Directory holding bundled data files (the IEEE-123 edge list); defaults
/// to the compiled-in source location, overridable via SGNE_DATA_DIR env.
std::filesystem::path data_dir();

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace);

/// report.json with final p, b, mu_c, residuals and iteration count.
void write_report_json(const std::string& path, const SolveReport& report,
                       const std::string& method);

}  // namespace sgne
