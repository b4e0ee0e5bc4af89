#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pldo/oracles.hpp"
#include "pldo/topology.hpp"

namespace pldo::harness {

/// Invalid configuration, anchored to a file and 1-based line when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class ProblemKind { LeastSquares, Quadratic, RobustLS };
enum class AlgorithmKind { DGD, MGDA, Centralized };
enum class InitKind { Zero, Random };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::LeastSquares;
  int n = 4;
  int d = 5;  // d_x for robust_ls
  int d_y = 5;
  /// Rows per node; 0 means d.
  int d_i = 0;
  double alpha = 2.0;
  double curvature = 1.0;
  std::uint64_t seed = 0;
  /// Redraw the instance for every run seed.
  bool vary_with_seed = false;
};

struct GraphSpec {
  SequenceKind kind = SequenceKind::Static;
  GraphParams params;
  /// Calibration horizon; 0 picks the default.
  int horizon = 0;
  bool vary_with_seed = false;
};

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::DGD;
  /// 0 selects 1/L_g (DGD) or 1/L_x, 1/L_yy,g (MGDA).
  double gamma = 0.0;
  std::int64_t N = 100;
  std::int64_t T = 1;
  std::vector<std::int64_t> T_list;
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  std::int64_t N_x = 100;
  std::int64_t N_y = 10;
  std::int64_t T_x = 1;
  std::int64_t T_y = 1;
  std::int64_t record_every = 1;
  bool auto_project = false;
  InitKind init = InitKind::Zero;
};

struct TheorySpec {
  /// Derive gamma, N and T from the budget.
  bool auto_configure = false;
  /// Fill the bound_f_gap column.
  bool overlay = false;
  /// Absolute target, or relative to the initial gap when eps_relative.
  double eps = 1e-6;
  bool eps_relative = true;
  double delta_prime = 1e-6;
  /// Separate consensus targets for the saddle budget; default delta_prime.
  std::optional<double> delta_prime_y;
  std::optional<double> eps_y;
  /// Upper bound on the stacked inner gap used to size T_y.
  std::optional<double> inner_gap_bound;
};

struct ExperimentConfig {
  ProblemSpec problem;
  GraphSpec graph;
  AlgorithmSpec algorithm;
  OracleSpec oracle;
  TheorySpec theory;
  std::vector<std::uint64_t> seeds{0};
  std::string output = "trace.csv";
  bool record_wall_time = false;
  /// Worker threads for seed fan-out; 0 = hardware concurrency.
  int threads = 0;
  /// Where the config came from, for messages.
  std::string source = "<string>";
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<string>");

/// Cross-field checks (positive sizes, alpha > 1 for robust_ls, ...).
void check_config(const ExperimentConfig& config);

/// Axis names accepted by set_axis: short aliases (n, sigma, T, ...) or
/// dotted paths such as oracle.delta.
std::vector<std::string> axis_names();
/// Throws ConfigError for an unknown axis or an out-of-range value.
void set_axis(ExperimentConfig& config, const std::string& axis, double value);

/// Resolved configuration as a JSON document (keys sorted, stable).
std::string config_json(const ExperimentConfig& config, int indent = 2);

std::string_view to_string(ProblemKind kind);
std::string_view to_string(AlgorithmKind kind);
std::string_view to_string(InitKind kind);

}  // namespace pldo::harness
