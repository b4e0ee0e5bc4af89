#include "pldo/algorithms.hpp"

#include <chrono>
#include <cmath>

namespace pldo {

RoundSchedule::RoundSchedule(std::vector<std::int64_t> per_k) : per_k_(std::move(per_k))
{
  if (per_k_.empty()) throw std::invalid_argument("round schedule list is empty");
  for (auto t : per_k_)
    if (t < 0) throw std::invalid_argument("round schedule entries must be >= 0");
  constant_ = per_k_.back();
}

std::int64_t RoundSchedule::at(std::int64_t k) const
{
  if (per_k_.empty()) return constant_;
  const auto idx = static_cast<std::size_t>(k);
  return idx < per_k_.size() ? per_k_[idx] : per_k_.back();
}

DivergenceError::DivergenceError(std::int64_t k, const std::string& what, RunRecord partial)
    : std::runtime_error("non-finite iterate at k=" + std::to_string(k) + ": " + what),
      k_(k),
      partial_(std::move(partial))
{
}

namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0)
{
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

bool is_consensual(const StackedState& x)
{
  return consensus_error(x) <= 1e-14 * (1.0 + x.matrix().norm());
}

bool should_record(std::int64_t k, std::int64_t last, std::int64_t stride)
{
  return k == last || (stride > 0 && k % stride == 0);
}

// Distinct oracle streams for the x and y gradients of a saddle run.
OracleSpec derived_spec(const OracleSpec& base, std::uint64_t salt)
{
  OracleSpec s = base;
  s.seed = derive_seed(base.seed, salt);
  return s;
}

std::int64_t linear_rate_steps(double ratio, double gap, double eps)
{
  if (!(gap > eps) || !(eps > 0.0)) return 0;
  return static_cast<std::int64_t>(std::ceil(ratio * std::log(gap / eps)));
}

}  // namespace

DGDResult dgd_run(const DistributedObjective& problem, const MixingModel& model, const DGDConfig& config,
                  StackedState x0)
{
  config.oracle.validate();
  if (!(config.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (config.iterations < 0) throw std::invalid_argument("iteration count must be >= 0");
  if (config.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const auto& prof = problem.smoothness();
  if (config.theory_mode && config.gamma > (1.0 + 1e-12) / prof.L_global)
    throw std::invalid_argument("theory mode requires gamma <= 1/L_g = " + std::to_string(1.0 / prof.L_global));
  if (x0.nodes() != problem.nodes() || x0.dim() != problem.dim())
    throw std::invalid_argument("initial state shape does not match the problem");
  if (x0.nodes() != model.node_count()) throw std::invalid_argument("network size does not match the problem");

  RunRecord rec;
  if (!is_consensual(x0)) {
    if (!config.auto_project) throw std::invalid_argument("initial point is not consensual (enable auto_project)");
    x0 = average_projection(x0);
    rec.auto_projected = true;
  }

  if (auto fs = problem.optimal_value()) {
    rec.f_star = *fs;
  } else {
    rec.f_star = estimate_optimal_value(problem, x0.mean_row());
    rec.optimum_source = "centralized_estimate";
  }

  const auto t_start = SteadyClock::now();
  BiasedOracle oracle(config.oracle, problem.nodes(), problem.dim());
  CommClock clock;
  StackedState x = std::move(x0);
  Vector xbar = x.mean_row();
  rec.initial_f_gap = problem.value(xbar) - rec.f_star;
  if (config.keep_mean_trajectory) rec.mean_x.push_back(xbar);

  for (std::int64_t k = 0; k < config.iterations; ++k) {
    const Matrix g = oracle.perturb(exact_stacked_gradient(problem, x));
    StackedState z(x.matrix() - config.gamma * g);
    StackedState next = run_consensus(std::move(z), config.rounds.at(k), model, clock);
    if (!next.all_finite()) {
      rec.total_comm_rounds = clock.now();
      throw DivergenceError(k + 1, "step size likely too large for this instance", std::move(rec));
    }
    if (config.observer) config.observer(k, x, g, next);
    x = std::move(next);

    xbar = x.mean_row();
    const double cerr = consensus_error(x);
    rec.max_consensus_error_x = std::max(rec.max_consensus_error_x, cerr);
    if (config.keep_mean_trajectory) rec.mean_x.push_back(xbar);

    if (should_record(k + 1, config.iterations, config.record_every)) {
      TracePoint p;
      p.k = k + 1;
      p.comm_rounds = clock.now();
      p.f_gap = problem.value(xbar) - rec.f_star;
      p.consensus_err_x = cerr;
      p.grad_norm_x = problem.gradient(xbar).norm();
      if (config.record_wall_time) p.wall_time_s = seconds_since(t_start);
      rec.points.push_back(p);
    }
  }
  rec.total_comm_rounds = clock.now();
  return {std::move(rec), std::move(x)};
}

MGDAResult mgda_run(const RobustLSProblem& problem, const MixingModel& model_x, const MixingModel& model_y,
                    const MGDAConfig& config, StackedState x0, StackedState y0)
{
  config.oracle.validate();
  if (!(config.gamma_x > 0.0) || !(config.gamma_y > 0.0)) throw std::invalid_argument("step sizes must be positive");
  if (config.N_x < 0 || config.N_y < 0 || config.T_x < 0 || config.T_y < 0)
    throw std::invalid_argument("iteration and round counts must be >= 0");
  if (config.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const int n = problem.nodes();
  if (x0.nodes() != n || y0.nodes() != n || x0.dim() != problem.dim_x() || y0.dim() != problem.dim_y())
    throw std::invalid_argument("initial states do not match the problem");
  if (model_x.node_count() != n || model_y.node_count() != n)
    throw std::invalid_argument("network size does not match the problem");

  RunRecord rec;
  if (!is_consensual(x0) || !is_consensual(y0)) {
    if (!config.auto_project) throw std::invalid_argument("initial point is not consensual (enable auto_project)");
    x0 = average_projection(x0);
    y0 = average_projection(y0);
    rec.auto_projected = true;
  }
  rec.f_star = problem.saddle().value;
  rec.max_consensus_error_y = 0.0;

  const auto& prof = problem.smoothness();
  const auto t_start = SteadyClock::now();
  BiasedOracle oracle_x(derived_spec(config.oracle, 1), n, problem.dim_x());
  BiasedOracle oracle_y(derived_spec(config.oracle, 2), n, problem.dim_y());
  CommClock clock;
  StackedState x = std::move(x0);
  StackedState y = std::move(y0);

  rec.initial_f_gap = problem.envelope_value(x.mean_row()) - rec.f_star;
  if (config.keep_mean_trajectory) {
    rec.mean_x.push_back(x.mean_row());
    rec.mean_y.push_back(y.mean_row());
  }

  for (std::int64_t k = 0; k < config.N_x; ++k) {
    const Vector xbar = x.mean_row();
    const InnerObjective inner = problem.inner(xbar);
    InnerStep step;
    step.k = k;
    step.stacked_gap_start = n * inner.gap(y.mean_row());
    {
      Matrix gs(n, problem.dim_y());
      for (int i = 0; i < n; ++i) gs.row(i) = problem.node_grad_y(i, xbar, inner.maximizer()).transpose();
      step.opt_grad_norm = gs.norm();
    }
    if (config.inner_eps && prof.mu_y > 0.0) {
      step.required_N_y = linear_rate_steps(prof.global.yy / prof.mu_y, step.stacked_gap_start, *config.inner_eps);
      if (*step.required_N_y > config.N_y) {
        ++rec.insufficient_inner_steps;
        if (rec.insufficient_inner_steps <= 5)
          rec.warnings.push_back("outer iteration " + std::to_string(k) + ": inner loop needs " +
                                 std::to_string(*step.required_N_y) + " steps, N_y = " +
                                 std::to_string(config.N_y));
      }
    }

    // inner ascent on Y at fixed X^k
    for (std::int64_t j = 0; j < config.N_y; ++j) {
      const Matrix gy = oracle_y.perturb(exact_stacked_grad_y(problem, x, y));
      StackedState zy(y.matrix() + config.gamma_y * gy);
      y = run_consensus(std::move(zy), config.T_y, model_y, clock);
      if (!y.all_finite()) {
        rec.total_comm_rounds = clock.now();
        throw DivergenceError(k + 1, "inner ascent diverged; gamma_y likely too large", std::move(rec));
      }
      *rec.max_consensus_error_y = std::max(*rec.max_consensus_error_y, consensus_error(y));
    }
    step.stacked_gap_end = n * inner.gap(y.mean_row());
    rec.inner_steps.push_back(step);

    // outer descent on X at Y^{k+1}
    const Matrix gx = oracle_x.perturb(exact_stacked_grad_x(problem, x, y));
    StackedState zx(x.matrix() - config.gamma_x * gx);
    x = run_consensus(std::move(zx), config.T_x, model_x, clock);
    if (!x.all_finite()) {
      rec.total_comm_rounds = clock.now();
      throw DivergenceError(k + 1, "outer descent diverged; gamma_x likely too large", std::move(rec));
    }

    const double cerr_x = consensus_error(x);
    rec.max_consensus_error_x = std::max(rec.max_consensus_error_x, cerr_x);
    if (config.keep_mean_trajectory) {
      rec.mean_x.push_back(x.mean_row());
      rec.mean_y.push_back(y.mean_row());
    }

    if (should_record(k + 1, config.N_x, config.record_every)) {
      const Vector xb = x.mean_row();
      const Vector yb = y.mean_row();
      const InnerObjective at_new = problem.inner(xb);
      TracePoint p;
      p.k = k + 1;
      p.comm_rounds = clock.now();
      p.f_gap = at_new.max_value() - rec.f_star;
      p.consensus_err_x = cerr_x;
      p.consensus_err_y = consensus_error(y);
      p.grad_norm_x = problem.grad_x(xb, yb).norm();
      p.grad_norm_y = problem.grad_y(xb, yb).norm();
      p.inner_gap = at_new.gap(yb);
      if (config.record_wall_time) p.wall_time_s = seconds_since(t_start);
      rec.points.push_back(p);
    }
  }
  if (rec.insufficient_inner_steps > 5)
    rec.warnings.push_back(std::to_string(rec.insufficient_inner_steps) +
                           " outer iterations in total had an insufficient inner budget");
  rec.total_comm_rounds = clock.now();
  return {std::move(rec), std::move(x), std::move(y)};
}

CentralizedTrace centralized_gd(const DistributedObjective& problem, double gamma, std::int64_t iterations,
                                const Vector& x0)
{
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double f_star = problem.optimal_value().value_or(0.0);
  CentralizedTrace tr;
  Vector x = x0;
  tr.x.push_back(x);
  tr.f_gap.push_back(problem.value(x) - f_star);
  for (std::int64_t k = 0; k < iterations; ++k) {
    x -= gamma * problem.gradient(x);
    if (!x.allFinite()) throw DivergenceError(k + 1, "centralized descent diverged");
    tr.x.push_back(x);
    tr.f_gap.push_back(problem.value(x) - f_star);
  }
  return tr;
}

CentralizedTrace centralized_gda(const RobustLSProblem& problem, double gamma_x, double gamma_y, std::int64_t N_x,
                                 std::int64_t N_y, const Vector& x0, const Vector& y0)
{
  if (!(gamma_x > 0.0) || !(gamma_y > 0.0)) throw std::invalid_argument("step sizes must be positive");
  const double f_star = problem.saddle().value;
  CentralizedTrace tr;
  Vector x = x0, y = y0;
  tr.x.push_back(x);
  tr.y.push_back(y);
  tr.f_gap.push_back(problem.envelope_value(x) - f_star);
  for (std::int64_t k = 0; k < N_x; ++k) {
    for (std::int64_t j = 0; j < N_y; ++j) y += gamma_y * problem.grad_y(x, y);
    x -= gamma_x * problem.grad_x(x, y);
    if (!x.allFinite() || !y.allFinite()) throw DivergenceError(k + 1, "centralized GDA diverged");
    tr.x.push_back(x);
    tr.y.push_back(y);
    tr.f_gap.push_back(problem.envelope_value(x) - f_star);
  }
  return tr;
}

double estimate_optimal_value(const DistributedObjective& problem, const Vector& x0, std::int64_t iterations)
{
  const double gamma = 1.0 / problem.smoothness().L_global;
  Vector x = x0;
  double best = problem.value(x);
  for (std::int64_t k = 0; k < iterations; ++k) {
    const Vector g = problem.gradient(x);
    if (g.norm() < 1e-14) break;
    x -= gamma * g;
    best = std::min(best, problem.value(x));
  }
  return best;
}

}  // namespace pldo
