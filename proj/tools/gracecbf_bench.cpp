// Scenario runner for the wall-approach safety-filter experiments.
//
//   gracecbf_bench list
//   gracecbf_bench run <id> [--x0 X ...] [--v0 V] [--out DIR] [--rtol R] [--atol A] [--horizon T]
//   gracecbf_bench verify <id|all> [--out DIR] [--rtol R] [--atol A]
//
// Exit status: 0 success, 1 expectation or integration failure, 2 usage error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gracecbf/bench.hpp"
#include "gracecbf/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::vector<double> x0;
  std::optional<double> v0;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<double> horizon;
  std::string out;
  std::string config;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Directory for CSV files and the summary report");
  cmd->add_option("--rtol", f.rtol, "Integrator relative tolerance");
  cmd->add_option("--atol", f.atol, "Integrator absolute tolerance");
  cmd->add_option("--config", f.config, "INI file with per-scenario overrides")->check(CLI::ExistingFile);
}

gracecbf::RunOverrides overrides_for(const std::string& id, const Flags& f) {
  gracecbf::RunOverrides o;
  if (!f.config.empty()) {
    const auto cfg = gracecbf::load_config(f.config);
    if (auto it = cfg.find(id); it != cfg.end()) o = it->second;
  }
  gracecbf::RunOverrides cli;
  if (!f.x0.empty()) cli.x0 = f.x0;
  cli.v0 = f.v0;
  cli.rel_tol = f.rtol;
  cli.abs_tol = f.atol;
  cli.horizon = f.horizon;
  if (!f.out.empty()) cli.out_dir = f.out;
  o.merge(cli);
  return o;
}

int list_scenarios() {
  for (const auto& s : gracecbf::registry()) {
    std::cout << s.id << "  " << to_string(s.barrier.family()) << "  " << s.description << '\n';
  }
  return kExitOk;
}

int run_scenario(const std::string& id, const Flags& f) {
  const auto result = gracecbf::run(id, overrides_for(id, f));
  std::cout << gracecbf::format_summary(result);
  for (const auto& cr : result.runs) {
    if (cr.csv_path) std::cout << "wrote " << cr.csv_path->string() << '\n';
  }
  return result.ok() ? kExitOk : kExitFailed;
}

int verify_scenarios(const std::string& target, const Flags& f) {
  std::vector<std::string> ids;
  if (target == "all") {
    for (const auto& s : gracecbf::registry()) ids.push_back(s.id);
  } else {
    gracecbf::find_scenario(target);
    ids.push_back(target);
  }
  bool all_passed = true;
  for (const auto& id : ids) {
    const auto report = gracecbf::verify(id, overrides_for(id, f));
    std::cout << report.format();
    all_passed = all_passed && report.passed();
  }
  return all_passed ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safety-filter scenario benchmark"};
  app.require_subcommand(1);
  Flags flags;

  app.add_subcommand("list", "List bundled scenarios");

  std::string run_id;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write CSV output");
  run_cmd->add_option("id", run_id, "Scenario id")->required();
  run_cmd->add_option("--x0", flags.x0, "Initial position(s); replaces the bundled set");
  run_cmd->add_option("--v0", flags.v0, "Initial velocity for second-order plants");
  run_cmd->add_option("--horizon", flags.horizon, "Simulated time in seconds");
  add_common(run_cmd, flags);

  std::string verify_id;
  auto* verify_cmd = app.add_subcommand("verify", "Check a scenario against its expected outcomes");
  verify_cmd->add_option("id", verify_id, "Scenario id or 'all'")->required();
  add_common(verify_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("list")) return list_scenarios();
    if (run_cmd->parsed()) return run_scenario(run_id, flags);
    return verify_scenarios(verify_id, flags);
  } catch (const gracecbf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case gracecbf::ErrorCode::UnknownScenario:
      case gracecbf::ErrorCode::ConfigError:
      case gracecbf::ErrorCode::InvalidArgument:
        return kExitUsage;
      default:
        return kExitFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}
