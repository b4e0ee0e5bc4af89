#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pldo/consensus.hpp"
#include "pldo/oracles.hpp"
#include "pldo/problems.hpp"
#include "pldo/topology.hpp"

namespace pldo {

/// Communication rounds per outer iteration: a constant, or an explicit list
/// indexed by k (the last entry repeats past its end).
class RoundSchedule {
 public:
  RoundSchedule(std::int64_t constant = 1) : constant_(constant) {}  // NOLINT: implicit on purpose
  explicit RoundSchedule(std::vector<std::int64_t> per_k);

  std::int64_t at(std::int64_t k) const;
  bool is_constant() const { return per_k_.empty(); }

 private:
  std::int64_t constant_ = 1;
  std::vector<std::int64_t> per_k_;
};


/// Called once per DGD iteration with X^k, the sampled stacked gradient and X^{k+1}.
using DGDObserver = std::function<void(std::int64_t k, const StackedState& before, const Matrix& gradient,
                                       const StackedState& after)>;

struct DGDConfig {
  double gamma = 0.0;
  std::int64_t iterations = 0;
  RoundSchedule rounds{1};
  OracleSpec oracle;
  std::int64_t record_every = 1;
  /// Reject gamma > 1/L_g.
  bool theory_mode = false;
  /// Replace a non-consensual X0 by its exact average (flagged in the record).
  bool auto_project = false;
  bool record_wall_time = false;
  bool keep_mean_trajectory = false;
  DGDObserver observer;
};

struct MGDAConfig {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  std::int64_t N_x = 0;
  std::int64_t N_y = 0;
  std::int64_t T_x = 1;
  std::int64_t T_y = 1;
  OracleSpec oracle;
  std::int64_t record_every = 1;
  bool auto_project = false;
  bool record_wall_time = false;
  bool keep_mean_trajectory = false;
  /// Inner accuracy target; when set, outer iterations whose inner loop would
  /// need more than N_y steps at gamma_y = 1/L_yy,g are reported.
  std::optional<double> inner_eps;
};

/// One recorded iterate. Saddle-only fields stay empty for minimization runs.
struct TracePoint {
  std::int64_t k = 0;
  std::int64_t comm_rounds = 0;
  double f_gap = 0.0;
  double consensus_err_x = 0.0;
  std::optional<double> consensus_err_y;
  double grad_norm_x = 0.0;
  std::optional<double> grad_norm_y;
  /// max_y phi(x_bar, y) - phi(x_bar, y_bar)
  std::optional<double> inner_gap;
  std::optional<double> wall_time_s;
};

/// Per outer iteration of MGDA: inner objective data at x_bar^k.
struct InnerStep {
  std::int64_t k = 0;
  /// Stacked gap G*(x_bar) - G(Y_bar) before and after the inner loop.
  double stacked_gap_start = 0.0;
  double stacked_gap_end = 0.0;
  /// |grad G_{x_bar}(Y_bar*)| on the stacked inner optimum.
  double opt_grad_norm = 0.0;
  /// Inner steps the linear rate would need to hit inner_eps (if set).
  std::optional<std::int64_t> required_N_y;
};

struct RunRecord {
  std::vector<TracePoint> points;
  /// "analytic" or "centralized_estimate"
  std::string optimum_source = "analytic";
  double f_star = 0.0;
  double initial_f_gap = 0.0;
  bool auto_projected = false;
  std::int64_t total_comm_rounds = 0;
  /// Over every outer iteration (not only recorded ones).
  double max_consensus_error_x = 0.0;
  std::optional<double> max_consensus_error_y;
  std::vector<InnerStep> inner_steps;
  std::int64_t insufficient_inner_steps = 0;
  std::vector<std::string> warnings;
  /// x_bar^0, ..., x_bar^N when requested.
  std::vector<Vector> mean_x;
  std::vector<Vector> mean_y;
};

/// Thrown on a non-finite iterate; carries the trace recorded so far.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t k, const std::string& what, RunRecord partial = {});
  std::int64_t iteration() const { return k_; }
  const RunRecord& partial() const { return partial_; }

 private:
  std::int64_t k_;
  RunRecord partial_;
};

struct DGDResult {
  RunRecord record;
  StackedState x;
};

struct MGDAResult {
  RunRecord record;
  StackedState x;
  StackedState y;
};

/// Decentralized gradient descent. Trace rows are the iterates after k = 1..N iterations (at the
/// recording stride, the last one always kept); gap at k = 0 sits in
/// RunRecord::initial_f_gap.
DGDResult dgd_run(const DistributedObjective& problem, const MixingModel& model, const DGDConfig& config,
                  StackedState x0);

/// Multi-step gradient descent ascent: N_y ascent steps on Y per descent step on X, one shared clock.
MGDAResult mgda_run(const RobustLSProblem& problem, const MixingModel& model_x, const MixingModel& model_y,
                    const MGDAConfig& config, StackedState x0, StackedState y0);

struct CentralizedTrace {
  std::vector<Vector> x;
  std::vector<Vector> y;
  std::vector<double> f_gap;
};

/// Exact gradient descent on f = mean f_i. x[0] = x0, x[k] after k steps.
CentralizedTrace centralized_gd(const DistributedObjective& problem, double gamma, std::int64_t iterations,
                                const Vector& x0);

/// Multi-step gradient descent ascent on the mean objective.
CentralizedTrace centralized_gda(const RobustLSProblem& problem, double gamma_x, double gamma_y, std::int64_t N_x,
                                 std::int64_t N_y, const Vector& x0, const Vector& y0);

/// f* of a problem without an analytic optimum: long exact GD from `x0`.
double estimate_optimal_value(const DistributedObjective& problem, const Vector& x0,
                              std::int64_t iterations = 100000);

}  // namespace pldo
