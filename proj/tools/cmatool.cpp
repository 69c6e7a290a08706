// Scenario runner: cmatool run <config>... | list | validate <config> | show <name>
// A config is a JSON file or the name of a built-in scenario.

#include "cma/errors.hpp"
#include "cma/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace {

cma::Json load(const std::string& ref) {
  if (!fs::exists(ref)) {
    auto names = cma::list_scenarios();
    if (std::find(names.begin(), names.end(), ref) != names.end()) return cma::builtin_scenario(ref);
    throw cma::InvalidInput("no such file or built-in scenario: " + ref);
  }
  std::ifstream in(ref);
  std::stringstream buf;
  buf << in.rdbuf();
  return cma::parse_config(buf.str());
}

int run_all(const std::vector<std::string>& refs, int jobs, const fs::path& out) {
  std::vector<int> codes(refs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < refs.size();) {
      auto t0 = std::chrono::steady_clock::now();
      cma::ScenarioResult res;
      try {
        res = cma::run_scenario(load(refs[i]));
      } catch (const std::exception& e) {
        res.name = fs::path(refs[i]).stem().string();
        res.exit_code = cma::kExitBadConfig;
        res.error = e.what();
      }
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (res.exit_code != cma::kExitBadConfig) cma::write_artifacts(res, out / res.name);
      codes[i] = res.exit_code;
      std::lock_guard lock(io);
      std::cout << (res.exit_code == 0 ? "ok    " : "FAIL  ") << res.name << "  exit " << res.exit_code << "  "
                << std::fixed << std::setprecision(2) << secs << " s\n" << std::defaultfloat << std::setprecision(6);
      auto asserted = res.report.data.value("asserted_checks", std::vector<std::string>{});
      for (const auto& c : res.report.checks)
        if (!c.passed && std::find(asserted.begin(), asserted.end(), c.name) != asserted.end()) std::cout << "      check " << c.name << " = " << c.value << " (" << c.relation << " " << c.bound << ")\n";
      if (!res.error.empty()) std::cout << "      " << res.error << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  // parse errors dominate, then solver failures, then failed checks
  for (int code : {cma::kExitBadConfig, cma::kExitSolverFailed, cma::kExitChecksFailed})
    if (std::find(codes.begin(), codes.end(), code) != codes.end()) return code;
  return cma::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric Monge-Ampere scenario runner"};
  app.require_subcommand(1);
  int jobs = 1;
  std::string out = "cma_out";
  app.add_option("--jobs,-j", jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
  app.add_option("--out,-o", out, "artifact directory (one subdirectory per scenario)");

  std::vector<std::string> refs;
  auto* run = app.add_subcommand("run", "run scenarios (files or built-in names; 'all' for the catalog)");
  run->add_option("config", refs, "scenario configs")->required();
  run->add_option("--jobs,-j", jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
  run->add_option("--out,-o", out, "artifact directory");

  auto* list = app.add_subcommand("list", "list the built-in scenarios");

  std::string one;
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", one)->required();

  auto* show = app.add_subcommand("show", "print the config of a built-in scenario");
  show->add_option("name", one)->required();

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& n : cma::list_scenarios()) std::cout << n << "  " << cma::scenario_description(n) << '\n';
    return 0;
  }
  if (*show) {
    try {
      std::cout << cma::builtin_scenario(one).dump(2) << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return cma::kExitBadConfig;
    }
  }
  if (*validate) {
    std::vector<std::string> diag;
    try {
      diag = cma::validate_config(load(one));
    } catch (const std::exception& e) {
      diag.push_back(e.what());
    }
    for (const auto& d : diag) std::cout << d << '\n';
    if (diag.empty()) std::cout << "ok\n";
    return diag.empty() ? 0 : cma::kExitBadConfig;
  }
  if (refs.size() == 1 && refs[0] == "all") refs = cma::list_scenarios();
  return run_all(refs, jobs, out);
}
