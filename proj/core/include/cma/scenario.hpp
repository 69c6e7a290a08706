#pragma once

#include "cma/report.hpp"
#include "cma/serialize.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cma {

/// Process exit codes of a scenario run.
enum ExitCode : int { kExitOk = 0, kExitChecksFailed = 1, kExitBadConfig = 2, kExitSolverFailed = 3 };

/// Normalization and units echoed into every report header.
Json report_header(const std::string& scenario);

struct MomentRow {
  std::string j;  // sweep index, or "limit"
  int k = 0, l = 0;
  double value = 0;
};

struct MeasureRow {
  std::string label;
  double x1 = 0, x2 = 0;  // log coordinates; -inf for the pole
  double mass = 0;
};

struct ScenarioResult {
  std::string name;
  int exit_code = kExitOk;
  Report report;
  std::vector<MomentRow> moments;
  std::vector<MeasureRow> measures;
  std::string error;  // parse or solver failure message
  std::map<std::string, std::string> tables;  // extra CSV artifacts: file name -> content

  Json report_json() const;
};

/// Built-in catalog.
std::vector<std::string> list_scenarios();
std::string scenario_description(const std::string& name);
/// Config of a catalog entry; throws InvalidInput for an unknown name.
Json builtin_scenario(const std::string& name);

/// Parses config text. Syntax errors throw InvalidInput with line and column.
Json parse_config(const std::string& text);
/// Field-level diagnostics ("field: message"); empty for a run-ready config.
std::vector<std::string> validate_config(const Json& config);

/// Runs a config. Never throws: failures are reported through exit_code.
ScenarioResult run_scenario(const Json& config);

/// report.json, moments.csv (j,k,l,value), measures.csv (label,x1,x2,mass),
/// plus the kind-specific tables.
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace cma
