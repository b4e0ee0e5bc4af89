#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pldo/algorithms.hpp"
#include "pldo/harness/config.hpp"
#include "pldo/harness/trace.hpp"
#include "pldo/problems.hpp"
#include "pldo/theory.hpp"
#include "pldo/topology.hpp"

namespace pldo::harness {

/// Problem and network for one run seed.
struct Instance {
  std::shared_ptr<const LeastSquaresProblem> minimization;
  std::shared_ptr<const RobustLSProblem> saddle;
  std::shared_ptr<const MixingModel> model;
  /// Empty when calibration failed (note holds the reason).
  std::optional<Contraction> contraction;
  std::string contraction_note;
  std::uint64_t problem_seed = 0;
  std::uint64_t graph_seed = 0;
};

Instance build_instance(const ExperimentConfig& config, std::uint64_t run_seed);

struct RunOutput {
  int run_id = 0;
  std::uint64_t seed = 0;
  RunRecord record;
  std::optional<std::string> failure;
  std::optional<std::int64_t> failure_k;
  std::optional<TheoryBudget> budget;
  std::optional<SaddleBudget> saddle_budget;
  /// Budget behind the bound column (realized consensus errors folded in).
  std::optional<TheoryBudget> overlay;
  std::optional<double> realized_D_Y_max;
  /// Algorithm parameters actually used.
  double gamma = 0.0, gamma_x = 0.0, gamma_y = 0.0;
  std::int64_t N = 0, N_x = 0, N_y = 0, T = 0, T_x = 0, T_y = 0;
  std::optional<double> wall_time_s;
  /// Network averages after the last iteration.
  Vector final_x;
  Vector final_y;
  std::vector<std::string> notes;
  Instance instance;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunOutput> runs;
  bool ok() const;
};

/// Runs every seed (in parallel across seeds); results are ordered by seed
/// index regardless of scheduling. `run_id_offset` shifts run ids (sweeps).
ExperimentResult run_experiment(const ExperimentConfig& config, int run_id_offset = 0);

std::vector<TraceRow> trace_rows(const ExperimentResult& result);
std::string sidecar_json(const ExperimentResult& result);

/// Text or JSON budget report for the first seed's instance.
std::string theory_report(const ExperimentConfig& config, bool json);

/// Path of the JSON sidecar next to a trace file.
std::string sidecar_path(const std::string& trace_path);

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> threads;
};

// CLI entry points. Exit codes: 0 success, 1 run/validation failure,
// 2 invalid configuration or arguments.
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, const std::string& axis, const std::vector<double>& values,
              std::ostream& out, std::ostream& err);
int cmd_theory(const CommandOptions& opts, bool json, std::ostream& out, std::ostream& err);
int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace pldo::harness
