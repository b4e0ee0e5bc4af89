// pldo: run, sweep, inspect and validate decentralized optimization experiments.

#include <CLI11.hpp>

#include <iostream>

#include "pldo/harness/runner.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Decentralized PL optimization simulator"};
  app.require_subcommand(1);

  pldo::harness::CommandOptions opts;
  std::string output;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run every seed of a config and write the trace CSV + JSON sidecar");
  run->add_option("config", opts.config_path, "Experiment YAML")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Trace CSV path (overrides the config)");
  run->add_option("-j,--jobs", threads, "Worker threads across seeds (0 = all cores)");

  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "Repeat a config over values of one numeric field");
  sweep->add_option("config", opts.config_path, "Experiment YAML")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "Field to vary (n, sigma, T, ... or a dotted path)")->required();
  sweep->add_option("--values", values, "Values, comma or space separated")->required()->delimiter(',');
  sweep->add_option("-o,--output", output, "Summary CSV path");
  sweep->add_option("-j,--jobs", threads, "Worker threads across seeds (0 = all cores)");

  bool json = false;
  auto* theory = app.add_subcommand("theory", "Print the theoretical budget for a config");
  theory->add_option("config", opts.config_path, "Experiment YAML")->required()->check(CLI::ExistingFile);
  theory->add_flag("--json", json, "Emit JSON instead of an aligned table");

  auto* validate = app.add_subcommand("validate", "Check mixing, problem and oracle invariants for a config");
  validate->add_option("config", opts.config_path, "Experiment YAML")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (!output.empty()) opts.output = output;
  if (threads > 0) opts.threads = threads;

  using namespace pldo::harness;
  if (*run) return cmd_run(opts, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(opts, axis, values, std::cout, std::cerr);
  if (*theory) return cmd_theory(opts, json, std::cout, std::cerr);
  if (*validate) return cmd_validate(opts, std::cout, std::cerr);
  return 2;
}
