// SPDX-License-Identifier: Apache-2.0
// simulate: run IMT-2020 evaluations and check results against requirements.
//
// Exit codes: 0 every evaluated requirement passes, 1 any fails, 2 error.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imteval/engine.hpp"
#include "imteval/error.hpp"
#include "imteval/profiles.hpp"
#include "imteval/report.hpp"
#include "imteval/requirements.hpp"
#include "imteval/scenario.hpp"

namespace {

using namespace imteval;

constexpr int kExitError = 2;

RequirementSet load_requirements(const std::string& source) {
  if (source.empty() || source == "builtin") return RequirementSet::builtin();
  return RequirementSet::load(source);
}

void print_report(const report::ComplianceReport& rep) {
  for (const auto& r : rep.rows) {
    std::cout << std::left << std::setw(20) << to_string(r.environment) << ' ' << std::setw(9)
              << to_string(r.direction) << ' ' << std::setw(30) << to_string(r.metric);
    if (r.speed_kmh) {
      std::cout << " @" << *r.speed_kmh << " km/h";
    }
    std::cout << "  measured ";
    if (r.measured) {
      std::cout << *r.measured;
    } else {
      std::cout << '-';
    }
    std::cout << "  required ";
    if (r.requirement) {
      std::cout << *r.requirement;
    } else {
      std::cout << '-';
    }
    std::cout << "  " << report::to_string(r.status);
    if (!r.evaluator.empty() && r.evaluator != "simulation") std::cout << "  [" << r.evaluator << ']';
    std::cout << '\n';
  }
  std::cout << rep.count(report::Status::Pass) << " pass, " << rep.count(report::Status::Fail)
            << " fail, " << rep.count(report::Status::NotEvaluated) << " not evaluated\n";
}

struct RunArgs {
  std::string scenario;
  std::string variant = "A";
  std::string config;
  std::optional<std::uint64_t> drops;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
  int workers = 1;
  std::string requirements = "builtin";
};

int cmd_run(const RunArgs& a) {
  auto cfg = preset(parse_environment(a.scenario), parse_variant(a.variant));
  if (!a.config.empty()) cfg = load_config(a.config, cfg);
  for (const auto& o : a.overrides) apply_override(cfg, o);
  if (a.drops) cfg.drops = *a.drops;
  if (a.seed) cfg.master_seed = *a.seed;
  cfg.validate();

  engine::RunOptions opts;
  opts.workers = a.workers;
  const auto result = engine::run(cfg, opts);
  const auto rep = report::check_compliance(result, load_requirements(a.requirements));

  std::cout << "config " << result.config_hash << ", seed " << result.master_seed << ", "
            << result.drops_run << " drops\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  print_report(rep);
  if (!a.out.empty()) {
    const auto files = report::emit(result, rep, a.out);
    std::cout << "wrote " << files.size() << " files to " << a.out << '\n';
  }
  return report::exit_code(rep);
}

int cmd_list() {
  for (const auto& p : list_presets()) {
    std::cout << std::left << std::setw(12) << short_name(p.environment) << ' '
              << to_string(p.variant) << "  " << std::setw(20) << to_string(p.environment) << "  "
              << p.description << '\n';
  }
  return 0;
}

int cmd_check(const std::string& results, const std::string& requirements) {
  const auto table = report::ingest_table(results);
  const auto rep = report::check_compliance(table, load_requirements(requirements));
  print_report(rep);
  return report::exit_code(rep);
}

int cmd_dump_profile(const std::string& name) {
  std::cout << channel::ProfileLibrary::builtin().dump(name);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMT-2020 system-level evaluation and compliance checking"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and check its KPIs");
  run_cmd->add_option("--scenario", run.scenario, "Environment name or alias (see list-scenarios)")
      ->required();
  run_cmd->add_option("--variant", run.variant, "Configuration variant")
      ->check(CLI::IsMember({"A", "B", "a", "b"}));
  run_cmd->add_option("--config", run.config, "INI file applied on top of the preset");
  run_cmd->add_option("--drops", run.drops, "Number of drops");
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--out", run.out, "Directory for the output bundle");
  run_cmd->add_option("--set", run.overrides, "Override, section.key=value (repeatable)");
  run_cmd->add_option("--workers", run.workers, "Worker threads, 0 for all cores")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--requirements", run.requirements, "builtin or a requirements CSV");

  app.add_subcommand("list-scenarios", "List the scenario presets");

  std::string results;
  std::string requirements = "builtin";
  auto* check_cmd = app.add_subcommand("check", "Check an external result table");
  check_cmd->add_option("--results", results, "Result table CSV")->required();
  check_cmd->add_option("--requirements", requirements, "builtin or a requirements CSV");

  std::string profile;
  auto* dump_cmd = app.add_subcommand("dump-profile", "Print a channel profile");
  dump_cmd->add_option("name", profile, "Profile name, e.g. UMa_A")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (app.got_subcommand("list-scenarios")) return cmd_list();
    if (*check_cmd) return cmd_check(results, requirements);
    if (*dump_cmd) return cmd_dump_profile(profile);
  } catch (const imteval::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
