#include "cma/report.hpp"

#include <algorithm>
#include <cmath>

namespace cma {

namespace {
// JSON has no infinities; keep them readable
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}
}  // namespace

const Check& Report::check_le(const std::string& name, double value, double bound,
                              const std::string& detail) {
  checks.push_back({name, value, bound, "<=", value <= bound, detail});
  return checks.back();
}

const Check& Report::check_ge(const std::string& name, double value, double bound,
                              const std::string& detail) {
  checks.push_back({name, value, bound, ">=", value >= bound, detail});
  return checks.back();
}

const Check& Report::check_true(const std::string& name, bool ok, const std::string& detail) {
  checks.push_back({name, ok ? 1.0 : 0.0, 1.0, "holds", ok, detail});
  return checks.back();
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (auto c : other.checks) {
    c.name = prefix + c.name;
    checks.push_back(std::move(c));
  }
  for (const auto& d : other.diagnostics) diagnostics.push_back(prefix + d);
  if (!other.data.empty()) data[prefix.empty() ? other.title : prefix] = other.data;
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["title"] = title;
  j["passed"] = passed();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = number(c.value);
    e["relation"] = c.relation;
    e["bound"] = number(c.bound);
    e["passed"] = c.passed;
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  if (!diagnostics.empty()) j["diagnostics"] = diagnostics;
  if (!data.empty()) j["data"] = data;
  return j;
}

}  // namespace cma
