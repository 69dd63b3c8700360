#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mzchaos/mzchaos.hpp"

namespace {

int report(const mzchaos::ScenarioResult& r) {
  if (!r.message.empty()) std::cerr << "mzchaos: " << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced models for Burgers' equation with uncertain viscosity"};
  app.require_subcommand(1);

  std::string config_path, scenario, out;
  auto* run = app.add_subcommand("run", "Run a scenario from a config file");
  run->add_option("--config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--scenario", scenario, "Override the scenario key");
  run->add_option("--out", out, "Override the output path ('-' for stdout)");

  int kmax = 48, sel_M = 7;
  double sel_dt = 0.001, nu0 = 0.1, nu1 = 0.07;
  std::optional<double> t0, t1;
  auto* sel = app.add_subcommand("select-memory", "Choose (t0, t1) and print the per-k bracket table");
  sel->add_option("--kmax", kmax)->capture_default_str();
  sel->add_option("--dt", sel_dt)->capture_default_str();
  sel->add_option("--nu0", nu0)->capture_default_str();
  sel->add_option("--nu1", nu1)->capture_default_str();
  sel->add_option("--M", sel_M, "Legendre polynomial count")->capture_default_str();
  sel->add_option("--t0", t0, "Assess this t0 instead of searching (needs --t1)");
  sel->add_option("--t1", t1);

  int tensor_M = 7;
  auto* tensor = app.add_subcommand("tensor", "Print nonzero c_lmr entries as CSV");
  tensor->add_option("--M", tensor_M)->capture_default_str();

  std::string base_path, cand_path, cmp_out = "-";
  auto* cmp = app.add_subcommand("compare", "Relative differences of two t,E,G series");
  cmp->add_option("baseline", base_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("candidate", cand_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", cmp_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    mzchaos::RunConfig cfg;
    if (*run) {
      cfg = mzchaos::parse_config(mzchaos::read_file(config_path));
      if (!scenario.empty()) cfg.scenario = scenario;
      if (!out.empty()) cfg.output = out;
    } else if (*sel) {
      cfg.scenario = "select-memory";
      cfg.kmax = kmax;
      cfg.N = 2 * kmax;
      cfg.M = sel_M;
      cfg.dt = sel_dt;
      cfg.T = 0.0;
      cfg.nu0 = nu0;
      cfg.nu1 = nu1;
      cfg.t0 = t0;
      cfg.t1 = t1;
      cfg.output = "-";
      if (t0.has_value() != t1.has_value()) throw CLI::ValidationError("--t0 and --t1 must be given together");
    } else if (*tensor) {
      cfg.scenario = "tensor";
      cfg.M = tensor_M;
      cfg.output = "-";
    } else if (*cmp) {
      cfg.scenario = "compare";
      cfg.baseline = base_path;
      cfg.candidate = cand_path;
      cfg.output = cmp_out;
    }
    mzchaos::validate(cfg);
    std::ostream& log = cfg.output == "-" ? std::cerr : std::cout;
    return report(mzchaos::run_scenario(cfg, log));
  } catch (const std::exception& e) {
    std::cerr << "mzchaos: " << e.what() << "\n";
    return mzchaos::kUsageError;
  }
}
