#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace cma {

struct Check {
  std::string name;
  double value = 0;
  double bound = 0;
  std::string relation;  // "<=", ">=" or "holds"
  bool passed = false;
  std::string detail;
};

/// Structured record of residuals, verdicts and tables produced by a run.
struct Report {
  std::string title;
  std::vector<Check> checks;
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  std::vector<std::string> diagnostics;

  explicit Report(std::string t = {}) : title(std::move(t)) {}

  const Check& check_le(const std::string& name, double value, double bound,
                        const std::string& detail = {});
  const Check& check_ge(const std::string& name, double value, double bound,
                        const std::string& detail = {});
  const Check& check_true(const std::string& name, bool ok, const std::string& detail = {});
  void merge(const Report& other, const std::string& prefix = {});

  bool passed() const;
  const Check* find(const std::string& name) const;
  nlohmann::ordered_json to_json() const;
};

}  // namespace cma
