#include "pldo/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "pldo/oracles.hpp"

namespace pldo::harness {

namespace {

constexpr std::uint64_t kInitSalt = 0x1417;

std::uint64_t seed_for(bool vary, std::uint64_t base, std::uint64_t run_seed)
{
  return vary ? derive_seed(base, run_seed) : base;
}

Vector initial_point(InitKind kind, int dim, std::uint64_t run_seed, std::uint64_t salt)
{
  if (kind == InitKind::Zero) return Vector::Zero(dim);
  std::mt19937_64 rng(derive_seed(run_seed, kInitSalt + salt));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
  return v;
}

// |grad F(X_bar*)|: node gradients at the common optimum, stacked.
double stacked_grad_at_opt(const LeastSquaresProblem& p)
{
  double s = 0.0;
  for (int i = 0; i < p.nodes(); ++i) s += p.node_gradient(i, *p.minimizer()).squaredNorm();
  return std::sqrt(s);
}

double stacked_envelope_grad_at_opt(const RobustLSProblem& p)
{
  const auto& sp = p.saddle();
  double s = 0.0;
  for (int i = 0; i < p.nodes(); ++i) s += p.node_grad_x(i, sp.x, sp.y).squaredNorm();
  return std::sqrt(s);
}

double stacked_inner_grad_at_opt(const RobustLSProblem& p, const InnerObjective& inner)
{
  double s = 0.0;
  for (int i = 0; i < p.nodes(); ++i) s += p.node_grad_y(i, inner.x(), inner.maximizer()).squaredNorm();
  return std::sqrt(s);
}

struct SaddleStart {
  double F_gap;
  double G_gap;
  double grad_F;
  double grad_G;
};

SaddleStart saddle_start(const RobustLSProblem& p, const Vector& x0, const Vector& y0)
{
  const double n = p.nodes();
  const InnerObjective inner = p.inner(x0);
  return {n * (inner.max_value() - p.saddle().value), n * inner.gap(y0), stacked_envelope_grad_at_opt(p),
          stacked_inner_grad_at_opt(p, inner)};
}

MinimizationInputs minimization_inputs(const ExperimentConfig& c, const LeastSquaresProblem& p, const Vector& x0,
                                       double delta_prime)
{
  MinimizationInputs in;
  in.f0_gap = std::max(0.0, p.value(x0) - *p.optimal_value());
  in.eps = c.theory.eps_relative ? c.theory.eps * in.f0_gap : c.theory.eps;
  if (!(in.eps > 0.0)) in.eps = c.theory.eps;  // start already optimal
  in.delta_prime = delta_prime;
  in.delta = c.oracle.bias_mode == BiasMode::Zero ? 0.0 : c.oracle.delta;
  in.sigma = c.oracle.noise_mode == NoiseMode::Zero ? 0.0 : c.oracle.sigma;
  in.grad_at_opt_norm = stacked_grad_at_opt(p);
  return in;
}

TheoryBudget minimization_budget(const ExperimentConfig& c, const LeastSquaresProblem& p, const Contraction& mix,
                                 const Vector& x0, double delta_prime, std::optional<double> gamma)
{
  const auto in = minimization_inputs(c, p, x0, delta_prime);
  if (in.sigma > 0.0) return budget_min_stochastic(p.smoothness(), mix, in, gamma);
  auto b = budget_min_deterministic(p.smoothness(), mix, in);
  if (gamma && *gamma < b.gamma) {
    b.rate = *gamma * p.smoothness().mu;
    b.notes.push_back("gamma below 1/L_g: rate (1 - gamma mu)");
  }
  return b;
}

SaddleInputs saddle_inputs(const ExperimentConfig& c, const RobustLSProblem& p, const SaddleStart& s)
{
  SaddleInputs in;
  const auto& t = c.theory;
  in.eps_x = t.eps_relative ? t.eps * s.F_gap : t.eps;
  if (!(in.eps_x > 0.0)) in.eps_x = t.eps;
  const double g_gap = t.inner_gap_bound.value_or(s.G_gap);
  in.eps_y = t.eps_y.value_or(t.eps_relative ? t.eps * g_gap : t.eps);
  if (!(in.eps_y > 0.0)) in.eps_y = t.eps;
  in.delta_prime_x = t.delta_prime;
  in.delta_prime_y = t.delta_prime_y.value_or(t.delta_prime);
  in.delta = c.oracle.bias_mode == BiasMode::Zero ? 0.0 : c.oracle.delta;
  in.sigma = c.oracle.noise_mode == NoiseMode::Zero ? 0.0 : c.oracle.sigma;
  in.F_gap = s.F_gap;
  in.G_gap = g_gap;
  in.grad_F_opt_norm = s.grad_F;
  in.grad_G_opt_norm = s.grad_G;
  (void)p;
  return in;
}

bool stochastic_oracle(const OracleSpec& o)
{
  return o.sigma > 0.0 && o.noise_mode != NoiseMode::Zero;
}

Contraction require_contraction(const Instance& inst)
{
  if (!inst.contraction) throw std::runtime_error("theory needs a contractive network: " + inst.contraction_note);
  return *inst.contraction;
}

void run_minimization(const ExperimentConfig& c, RunOutput& out)
{
  const auto& p = *out.instance.minimization;
  const auto& a = c.algorithm;
  const Vector x0 = initial_point(a.init, p.dim(), out.seed, 0);
  const double Lg = p.smoothness().L_global;

  out.gamma = a.gamma > 0.0 ? a.gamma : 1.0 / Lg;
  out.N = a.N;
  out.T = a.T;
  RoundSchedule schedule = a.T_list.empty() ? RoundSchedule(a.T) : RoundSchedule(a.T_list);

  if (c.theory.auto_configure && a.kind == AlgorithmKind::DGD) {
    const auto mix = require_contraction(out.instance);
    auto b = minimization_budget(c, p, mix, x0, c.theory.delta_prime, std::nullopt);
    if (!b.T) throw std::runtime_error("theory budget has no finite T");
    out.gamma = b.gamma;
    out.N = b.N;
    out.T = *b.T;
    schedule = RoundSchedule(out.T);
    out.budget = b;
  }

  if (a.kind == AlgorithmKind::Centralized) {
    const auto tr = centralized_gd(p, out.gamma, out.N, x0);
    RunRecord rec;
    rec.f_star = *p.optimal_value();
    rec.initial_f_gap = tr.f_gap.front();
    for (std::int64_t k = 1; k <= out.N; ++k) {
      if (!(k == out.N || k % a.record_every == 0)) continue;
      TracePoint pt;
      pt.k = k;
      pt.f_gap = tr.f_gap[static_cast<std::size_t>(k)];
      pt.grad_norm_x = p.gradient(tr.x[static_cast<std::size_t>(k)]).norm();
      rec.points.push_back(pt);
    }
    out.record = std::move(rec);
    out.final_x = tr.x.back();
    out.T = 0;
    return;
  }

  DGDConfig cfg;
  cfg.gamma = out.gamma;
  cfg.iterations = out.N;
  cfg.rounds = schedule;
  cfg.oracle = c.oracle;
  cfg.oracle.seed = out.seed;
  cfg.record_every = a.record_every;
  cfg.auto_project = a.auto_project;
  cfg.record_wall_time = c.record_wall_time;
  const auto res = dgd_run(p, *out.instance.model, cfg, StackedState::replicate(x0, p.nodes()));
  out.record = res.record;
  out.final_x = res.x.mean_row();
}

void run_saddle(const ExperimentConfig& c, RunOutput& out)
{
  const auto& p = *out.instance.saddle;
  const auto& a = c.algorithm;
  const auto& prof = p.smoothness();
  const Vector x0 = initial_point(a.init, p.dim_x(), out.seed, 0);
  const Vector y0 = initial_point(a.init, p.dim_y(), out.seed, 1);

  out.gamma_x = a.gamma_x > 0.0 ? a.gamma_x : 1.0 / prof.L_x;
  out.gamma_y = a.gamma_y > 0.0 ? a.gamma_y : 1.0 / prof.global.yy;
  out.N_x = a.N_x;
  out.N_y = a.N_y;
  out.T_x = a.T_x;
  out.T_y = a.T_y;

  const bool want_budget = c.theory.auto_configure || c.theory.overlay || c.theory.eps_y.has_value();
  std::optional<double> inner_eps;
  if (want_budget && out.instance.contraction && prof.mu_x > 0.0 && prof.mu_y > 0.0) {
    const auto s = saddle_start(p, x0, y0);
    const auto in = saddle_inputs(c, p, s);
    const auto mix = *out.instance.contraction;
    out.saddle_budget = budget_saddle(prof, mix, mix, in, stochastic_oracle(c.oracle));
    inner_eps = in.eps_y;
  }
  if (c.theory.auto_configure) {
    if (a.kind == AlgorithmKind::MGDA) require_contraction(out.instance);
    if (!out.saddle_budget || !out.saddle_budget->usable)
      throw std::runtime_error("saddle budget is incomplete; cannot auto-configure");
    const auto& b = *out.saddle_budget;
    out.gamma_x = b.gamma_x;
    out.gamma_y = b.gamma_y;
    out.N_x = *b.N_x;
    out.N_y = *b.N_y;
    out.T_x = *b.T_x;
    out.T_y = *b.T_y;
  }

  if (a.kind == AlgorithmKind::Centralized) {
    const auto tr = centralized_gda(p, out.gamma_x, out.gamma_y, out.N_x, out.N_y, x0, y0);
    RunRecord rec;
    rec.f_star = p.saddle().value;
    rec.initial_f_gap = tr.f_gap.front();
    for (std::int64_t k = 1; k <= out.N_x; ++k) {
      if (!(k == out.N_x || k % a.record_every == 0)) continue;
      const auto& x = tr.x[static_cast<std::size_t>(k)];
      const auto& y = tr.y[static_cast<std::size_t>(k)];
      TracePoint pt;
      pt.k = k;
      pt.f_gap = tr.f_gap[static_cast<std::size_t>(k)];
      pt.consensus_err_y = 0.0;
      pt.grad_norm_x = p.grad_x(x, y).norm();
      pt.grad_norm_y = p.grad_y(x, y).norm();
      pt.inner_gap = p.inner(x).gap(y);
      rec.points.push_back(pt);
    }
    out.record = std::move(rec);
    out.final_x = tr.x.back();
    out.final_y = tr.y.back();
    out.T_x = out.T_y = 0;
    return;
  }

  MGDAConfig cfg;
  cfg.gamma_x = out.gamma_x;
  cfg.gamma_y = out.gamma_y;
  cfg.N_x = out.N_x;
  cfg.N_y = out.N_y;
  cfg.T_x = out.T_x;
  cfg.T_y = out.T_y;
  cfg.oracle = c.oracle;
  cfg.oracle.seed = out.seed;
  cfg.record_every = a.record_every;
  cfg.auto_project = a.auto_project;
  cfg.record_wall_time = c.record_wall_time;
  cfg.inner_eps = inner_eps;
  const auto& model = *out.instance.model;
  const auto res = mgda_run(p, model, model, cfg, StackedState::replicate(x0, p.nodes()),
                            StackedState::replicate(y0, p.nodes()));
  out.record = res.record;
  out.final_x = res.x.mean_row();
  out.final_y = res.y.mean_row();
}

// Bound column: the budget re-evaluated with the consensus errors the run
// actually reached, so it is a valid bound for this trace.
void attach_overlay(const ExperimentConfig& c, RunOutput& out)
{
  if (!c.theory.overlay || out.failure) return;
  const auto& rec = out.record;
  if (out.instance.minimization) {
    const auto& p = *out.instance.minimization;
    const double Lg = p.smoothness().L_global;
    if (out.gamma > (1.0 + 1e-12) / Lg) {
      out.notes.push_back("overlay skipped: gamma > 1/L_g");
      return;
    }
    const double dp = std::max(c.theory.delta_prime, rec.max_consensus_error_x * rec.max_consensus_error_x);
    const Contraction mix = out.instance.contraction.value_or(Contraction{1, 1.0});
    const Vector x0 = initial_point(c.algorithm.init, p.dim(), out.seed, 0);
    TheoryBudget b = minimization_budget(c, p, mix, x0, c.algorithm.kind == AlgorithmKind::Centralized ? 0.0 : dp,
                                         out.gamma);
    b.f0_gap = rec.initial_f_gap;
    out.overlay = b;
    return;
  }
  const auto& p = *out.instance.saddle;
  const auto& prof = p.smoothness();
  if (!(prof.mu_x > 0.0 && prof.mu_y > 0.0)) {
    out.notes.push_back("overlay skipped: degenerate PL constants");
    return;
  }
  if (out.gamma_x > (1.0 + 1e-12) / prof.L_x) {
    out.notes.push_back("overlay skipped: gamma_x > 1/L_x");
    return;
  }
  double end_gap = 0.0;
  for (const auto& s : rec.inner_steps) end_gap = std::max(end_gap, s.stacked_gap_end / p.nodes());
  for (const auto& pt : rec.points)
    if (pt.inner_gap) end_gap = std::max(end_gap, *pt.inner_gap);
  SaddleInputs in;
  in.eps_x = 1.0;
  in.eps_y = std::max(end_gap, 1e-300);
  in.delta_prime_x = rec.max_consensus_error_x * rec.max_consensus_error_x;
  const double ey = rec.max_consensus_error_y.value_or(0.0);
  in.delta_prime_y = ey * ey;
  in.delta = c.oracle.bias_mode == BiasMode::Zero ? 0.0 : c.oracle.delta;
  in.sigma = c.oracle.noise_mode == NoiseMode::Zero ? 0.0 : c.oracle.sigma;
  const Contraction mix = out.instance.contraction.value_or(Contraction{1, 1.0});
  const auto sb = budget_saddle(prof, mix, mix, in, stochastic_oracle(c.oracle));
  TheoryBudget b;
  b.mode = sb.mode;
  b.gamma = out.gamma_x;
  b.rate = out.gamma_x * prof.mu_x;
  b.f0_gap = rec.initial_f_gap;
  b.floor = sb.floor_x;
  b.Delta = sb.Delta_x;
  b.expectation = stochastic_oracle(c.oracle);
  b.notes.push_back("saddle overlay: outer rate (1 - gamma_x mu_x), floor from realized inner gap");
  out.overlay = b;
}

void attach_inner_drift(RunOutput& out)
{
  if (!out.saddle_budget || out.record.inner_steps.empty()) return;
  const auto& p = *out.instance.saddle;
  const bool sto = out.saddle_budget->mode == BudgetMode::SaddleStochastic;
  double mx = 0.0;
  for (const auto& s : out.record.inner_steps)
    mx = std::max(mx, inner_drift_constant(p.smoothness(), sto, out.saddle_budget->Delta_y,
                                           out.saddle_budget->delta_prime_y, s.opt_grad_norm, s.stacked_gap_start));
  out.realized_D_Y_max = mx;
}

RunOutput run_one(const ExperimentConfig& c, int run_id, std::uint64_t seed)
{
  RunOutput out;
  out.run_id = run_id;
  out.seed = seed;
  out.instance = build_instance(c, seed);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (out.instance.minimization)
      run_minimization(c, out);
    else
      run_saddle(c, out);
  } catch (const DivergenceError& e) {
    out.record = e.partial();
    out.failure = e.what();
    out.failure_k = e.iteration();
  }
  if (c.record_wall_time)
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  attach_overlay(c, out);
  attach_inner_drift(out);
  return out;
}

Json budget_json(const TheoryBudget& b)
{
  Json j = {{"mode", to_string(b.mode)}, {"gamma", number(b.gamma)},      {"N", b.N},
            {"T", b.T ? Json(*b.T) : Json(nullptr)},
            {"N_tot", b.N_tot ? Json(*b.N_tot) : Json(nullptr)},
            {"D", number(b.D)},          {"Delta", number(b.Delta)},      {"floor", number(b.floor)},
            {"eps", number(b.eps)},      {"delta_prime", number(b.delta_prime)},
            {"rate", number(b.rate)},    {"f0_gap", number(b.f0_gap)},    {"expectation", b.expectation},
            {"notes", b.notes}};
  return j;
}

template <class T>
Json opt(const std::optional<T>& v)
{
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>)
    return number(*v);
  else
    return Json(*v);
}

Json budget_json(const SaddleBudget& b)
{
  return {{"mode", to_string(b.mode)},
          {"L_x", number(b.L_x)},
          {"gamma_x", number(b.gamma_x)},
          {"gamma_y", number(b.gamma_y)},
          {"Delta_x", number(b.Delta_x)},
          {"Delta_y", number(b.Delta_y)},
          {"eps_x", number(b.eps_x)},
          {"eps_y", number(b.eps_y)},
          {"delta_prime_x", number(b.delta_prime_x)},
          {"delta_prime_y", number(b.delta_prime_y)},
          {"D_X", opt(b.D_X)},
          {"D_Y", opt(b.D_Y)},
          {"D_Y_two_over_mu", opt(b.D_Y_alt)},
          {"N_x", opt(b.N_x)},
          {"N_y", opt(b.N_y)},
          {"T_x", opt(b.T_x)},
          {"T_y", opt(b.T_y)},
          {"T_tot", opt(b.T_tot)},
          {"floor_x", number(b.floor_x)},
          {"floor_y", number(b.floor_y)},
          {"usable", b.usable},
          {"notes", b.notes}};
}

Json constants_json(const Instance& inst)
{
  Json j;
  if (inst.minimization) {
    const auto& s = inst.minimization->smoothness();
    j["n"] = s.nodes();
    j["d"] = inst.minimization->dim();
    j["L_l"] = number(s.L_local);
    j["L_g"] = number(s.L_global);
    j["mu"] = number(s.mu);
    j["f_star"] = number(*inst.minimization->optimal_value());
  } else {
    const auto& p = *inst.saddle;
    const auto& s = p.smoothness();
    auto node = [](const SaddleSmoothness::Node& nd) {
      return Json{{"xx", number(nd.xx)}, {"xy", number(nd.xy)}, {"yx", number(nd.yx)}, {"yy", number(nd.yy)}};
    };
    j["n"] = s.nodes();
    j["d_x"] = p.dim_x();
    j["d_y"] = p.dim_y();
    j["alpha"] = p.alpha();
    j["L_local"] = node(s.local);
    j["L_global"] = node(s.global);
    j["mu_x"] = number(s.mu_x);
    j["mu_y"] = number(s.mu_y);
    j["mu_x_unnormalized"] = number(s.mu_x_unnormalized);
    j["mu_y_unnormalized"] = number(s.mu_y_unnormalized);
    j["L_x"] = number(s.L_x);
    j["saddle_value"] = number(p.saddle().value);
    j["saddle_residual_x"] = number(p.saddle().residual_x);
    j["saddle_residual_y"] = number(p.saddle().residual_y);
    j["saddle_min_norm_fallback"] = p.saddle().min_norm_fallback;
  }
  j["tau"] = inst.model->tau();
  j["graph_period"] = inst.model->sequence().period();
  j["lambda"] = inst.contraction ? number(inst.contraction->lambda) : Json(nullptr);
  if (!inst.contraction_note.empty()) j["contraction_note"] = inst.contraction_note;
  j["problem_seed"] = inst.problem_seed;
  j["graph_seed"] = inst.graph_seed;
  return j;
}

int thread_count(int requested, std::size_t jobs)
{
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(1, jobs)));
}

void write_file(const std::string& path, const std::string& content)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

}  // namespace

Instance build_instance(const ExperimentConfig& c, std::uint64_t run_seed)
{
  Instance inst;
  const auto& p = c.problem;
  inst.problem_seed = seed_for(p.vary_with_seed, p.seed, run_seed);
  inst.graph_seed = seed_for(c.graph.vary_with_seed, c.graph.params.seed, run_seed);
  const int rows = p.d_i > 0 ? p.d_i : p.d;
  switch (p.kind) {
    case ProblemKind::LeastSquares:
      inst.minimization = std::make_shared<LeastSquaresProblem>(build_least_squares(p.n, p.d, rows, inst.problem_seed));
      break;
    case ProblemKind::Quadratic:
      inst.minimization =
          std::make_shared<LeastSquaresProblem>(build_isotropic_quadratic(p.n, p.d, p.curvature, inst.problem_seed));
      break;
    case ProblemKind::RobustLS:
      inst.saddle =
          std::make_shared<RobustLSProblem>(build_robust_ls(p.n, p.d, p.d_y, rows, p.alpha, inst.problem_seed));
      break;
  }
  GraphParams gp = c.graph.params;
  gp.seed = inst.graph_seed;
  auto seq = make_graph_sequence(p.n, c.graph.kind, gp);
  try {
    auto m = MixingModel::calibrated(seq, c.graph.horizon);
    inst.contraction = m.contraction();
    inst.model = std::make_shared<MixingModel>(std::move(m));
  } catch (const NonContractiveError& e) {
    inst.contraction_note = e.what();
    inst.model = std::make_shared<MixingModel>(MixingModel::metropolis(std::move(seq)));
  }
  return inst;
}

bool ExperimentResult::ok() const
{
  return std::none_of(runs.begin(), runs.end(), [](const RunOutput& r) { return r.failure.has_value(); });
}

ExperimentResult run_experiment(const ExperimentConfig& config, int run_id_offset)
{
  ExperimentResult result;
  result.config = config;
  const auto& seeds = config.seeds;
  result.runs.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        result.runs[i] = run_one(config, run_id_offset + static_cast<int>(i), seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = thread_count(config.threads, seeds.size());
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

std::vector<TraceRow> trace_rows(const ExperimentResult& result)
{
  std::vector<TraceRow> rows;
  for (const auto& run : result.runs) {
    for (const auto& pt : run.record.points) {
      TraceRow r;
      r.run_id = run.run_id;
      r.seed = run.seed;
      r.point = pt;
      if (run.overlay) r.bound = overlay_bound_at(*run.overlay, pt.k);
      rows.push_back(r);
    }
    if (run.failure) rows.push_back(failure_row(run.run_id, run.seed, *run.failure_k, run.record.total_comm_rounds));
  }
  return rows;
}

std::string sidecar_json(const ExperimentResult& result)
{
  Json j;
  j["config"] = config_to_json(result.config);
  Json runs = Json::array();
  for (const auto& r : result.runs) {
    Json run;
    run["run_id"] = r.run_id;
    run["seed"] = r.seed;
    run["status"] = r.failure ? "diverged" : "ok";
    if (r.failure) {
      run["failure"] = *r.failure;
      run["failure_k"] = *r.failure_k;
    }
    run["constants"] = constants_json(r.instance);
    Json params;
    if (r.instance.minimization) {
      params = {{"gamma", number(r.gamma)}, {"N", r.N}, {"T", r.T}};
    } else {
      params = {{"gamma_x", number(r.gamma_x)}, {"gamma_y", number(r.gamma_y)}, {"N_x", r.N_x},
                {"N_y", r.N_y},                 {"T_x", r.T_x},                 {"T_y", r.T_y}};
    }
    run["parameters"] = params;
    const auto& rec = r.record;
    run["optimum_source"] = rec.optimum_source;
    run["f_star"] = number(rec.f_star);
    run["initial_f_gap"] = number(rec.initial_f_gap);
    run["auto_projected"] = rec.auto_projected;
    run["total_comm_rounds"] = rec.total_comm_rounds;
    run["max_consensus_error_x"] = number(rec.max_consensus_error_x);
    run["max_consensus_error_y"] = opt(rec.max_consensus_error_y);
    if (!rec.inner_steps.empty()) run["insufficient_inner_steps"] = rec.insufficient_inner_steps;
    run["budget"] = r.budget ? budget_json(*r.budget) : r.saddle_budget ? budget_json(*r.saddle_budget) : Json(nullptr);
    run["overlay"] = r.overlay ? budget_json(*r.overlay) : Json(nullptr);
    run["realized_D_Y_max"] = opt(r.realized_D_Y_max);
    run["wall_time_s"] = opt(r.wall_time_s);
    run["warnings"] = rec.warnings;
    run["notes"] = r.notes;
    runs.push_back(run);
  }
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::string sidecar_path(const std::string& trace_path)
{
  const auto dot = trace_path.rfind('.');
  const auto slash = trace_path.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return trace_path.substr(0, dot) + ".json";
  return trace_path + ".json";
}

std::string theory_report(const ExperimentConfig& c, bool json)
{
  const auto inst = build_instance(c, c.seeds.front());
  const auto mix = require_contraction(inst);
  Json j;
  j["constants"] = constants_json(inst);
  if (inst.minimization) {
    const auto& p = *inst.minimization;
    const Vector x0 = initial_point(c.algorithm.init, p.dim(), c.seeds.front(), 0);
    const std::optional<double> gamma = c.algorithm.gamma > 0.0 ? std::optional(c.algorithm.gamma) : std::nullopt;
    j["budget"] = budget_json(minimization_budget(c, p, mix, x0, c.theory.delta_prime, gamma));
  } else {
    const auto& p = *inst.saddle;
    const Vector x0 = initial_point(c.algorithm.init, p.dim_x(), c.seeds.front(), 0);
    const Vector y0 = initial_point(c.algorithm.init, p.dim_y(), c.seeds.front(), 1);
    const auto s = saddle_start(p, x0, y0);
    j["budget"] = budget_json(budget_saddle(p.smoothness(), mix, mix, saddle_inputs(c, p, s), stochastic_oracle(c.oracle)));
  }
  if (json) return j.dump(2) + "\n";

  std::ostringstream out;
  auto line = [&](const std::string& key, const Json& v) {
    out << std::left << std::setw(28) << key << ' ' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  };
  auto section = [&](const std::string& title, const Json& obj) {
    out << "[" << title << "]\n";
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it.value().is_object()) {
        for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) line(it.key() + "." + jt.key(), jt.value());
      } else if (it.value().is_array()) {
        for (const auto& e : it.value()) line(it.key(), e);
      } else {
        line(it.key(), it.value());
      }
    }
  };
  section("constants", j["constants"]);
  section("budget", j["budget"]);
  return out.str();
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
  ExperimentConfig c;
  try {
    c = load_config(opts.config_path);
    if (opts.output) c.output = *opts.output;
    if (opts.threads) c.threads = *opts.threads;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  ExperimentResult res;
  try {
    res = run_experiment(c);
  } catch (const std::exception& e) {
    err << "error: " << c.source << ": " << e.what() << '\n';
    return 2;
  }
  try {
    std::ostringstream csv;
    write_trace(csv, trace_rows(res));
    write_file(c.output, csv.str());
    write_file(sidecar_path(c.output), sidecar_json(res));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& r : res.runs) {
    for (const auto& w : r.record.warnings) err << "warning: run " << r.run_id << ": " << w << '\n';
    if (r.failure) err << "error: run " << r.run_id << " (seed " << r.seed << "): " << *r.failure << '\n';
  }
  out << "wrote " << c.output << " and " << sidecar_path(c.output) << " (" << res.runs.size() << " runs)\n";
  return res.ok() ? 0 : 1;
}

int cmd_sweep(const CommandOptions& opts, const std::string& axis, const std::vector<double>& values,
              std::ostream& out, std::ostream& err)
{
  ExperimentConfig base;
  try {
    base = load_config(opts.config_path);
    if (opts.threads) base.threads = *opts.threads;
    if (values.empty()) throw ConfigError(base.source, 0, "sweep needs at least one value");
    ExperimentConfig probe = base;
    set_axis(probe, axis, values.front());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  std::string path = opts.output.value_or("");
  if (path.empty()) {
    const auto sc = sidecar_path(base.output);
    path = sc.substr(0, sc.size() - 5) + "_sweep_" + axis + ".csv";
  }

  std::ostringstream csv;
  csv << kSweepHeader << '\n';
  bool ok = true;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    ExperimentConfig c = base;
    ExperimentResult res;
    try {
      set_axis(c, axis, values[vi]);
      res = run_experiment(c, static_cast<int>(vi * c.seeds.size()));
    } catch (const std::exception& e) {
      err << "error: " << axis << "=" << format_double(values[vi]) << ": " << e.what() << '\n';
      return 2;
    }
    for (const auto& r : res.runs) {
      const auto& pts = r.record.points;
      const TracePoint last = pts.empty() ? TracePoint{} : pts.back();
      ok = ok && !r.failure;
      csv << axis << ',' << format_double(values[vi]) << ',' << r.run_id << ',' << r.seed << ','
          << (r.failure ? "diverged" : "ok") << ',' << last.k << ',' << format_double(pts.empty() ? r.record.initial_f_gap : last.f_gap) << ','
          << format_double(last.consensus_err_x) << ',' << format_optional(last.consensus_err_y) << ','
          << r.record.total_comm_rounds << ',' << format_optional(r.wall_time_s) << '\n';
      if (r.failure) err << "error: run " << r.run_id << ": " << *r.failure << '\n';
    }
  }
  try {
    write_file(path, csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out << "wrote " << path << " (" << values.size() << " values x " << base.seeds.size() << " seeds)\n";
  return ok ? 0 : 1;
}

int cmd_theory(const CommandOptions& opts, bool json, std::ostream& out, std::ostream& err)
{
  try {
    const auto c = load_config(opts.config_path);
    out << theory_report(c, json);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << opts.config_path << ": " << e.what() << '\n';
    return 1;
  }
}

namespace {

struct Checks {
  std::ostream& out;
  bool ok = true;
  void report(const std::string& name, bool passed, const std::string& detail)
  {
    out << (passed ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << '\n';
    ok = ok && passed;
  }
};

std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

// Largest PL and QG ratios (lhs / rhs) over random points around the optimum.
std::pair<double, double> sample_pl_qg(const LeastSquaresProblem& p, std::uint64_t seed, int samples)
{
  std::mt19937_64 rng(derive_seed(seed, 0x91));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mu = p.smoothness().mu;
  const double fs = *p.optimal_value();
  double pl = 0.0, qg = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector x = *p.minimizer();
    for (int i = 0; i < x.size(); ++i) x(i) += gauss(rng);
    const double gap = p.value(x) - fs;
    const double g2 = p.gradient(x).squaredNorm();
    if (g2 > 0.0) pl = std::max(pl, gap / (g2 / (2.0 * mu)));
    if (gap > 0.0) qg = std::max(qg, (x - p.nearest_minimizer(x)).squaredNorm() / (2.0 / mu * gap));
  }
  return {pl, qg};
}

std::pair<double, double> sample_pl_saddle(const RobustLSProblem& p, std::uint64_t seed, int samples)
{
  std::mt19937_64 rng(derive_seed(seed, 0x92));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& s = p.smoothness();
  double px = 0.0, py = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vector x = p.saddle().x, y = p.saddle().y;
    for (int i = 0; i < x.size(); ++i) x(i) += gauss(rng);
    for (int i = 0; i < y.size(); ++i) y(i) += gauss(rng);
    const double gap_x = p.envelope_value(x) - p.saddle().value;
    const double gx2 = p.envelope_gradient(x).squaredNorm();
    if (gx2 > 0.0) px = std::max(px, gap_x / (gx2 / (2.0 * s.mu_x)));
    const auto inner = p.inner(x);
    const double gap_y = inner.gap(y);
    const double gy2 = inner.gradient(y).squaredNorm();
    if (gy2 > 0.0) py = std::max(py, gap_y / (gy2 / (2.0 * s.mu_y)));
  }
  return {px, py};
}

}  // namespace

int cmd_validate(const CommandOptions& opts, std::ostream& out, std::ostream& /*err*/)
{
  Checks ck{out};
  ExperimentConfig c;
  try {
    c = load_config(opts.config_path);
    ck.report("config", true, c.source);
  } catch (const ConfigError& e) {
    ck.report("config", false, e.what());
    return 1;
  }
  const std::uint64_t seed = c.seeds.front();
  const auto& ps = c.problem;

  std::shared_ptr<const LeastSquaresProblem> ls;
  std::shared_ptr<const RobustLSProblem> rls;
  try {
    const int rows = ps.d_i > 0 ? ps.d_i : ps.d;
    const auto pseed = seed_for(ps.vary_with_seed, ps.seed, seed);
    if (ps.kind == ProblemKind::LeastSquares)
      ls = std::make_shared<LeastSquaresProblem>(build_least_squares(ps.n, ps.d, rows, pseed));
    else if (ps.kind == ProblemKind::Quadratic)
      ls = std::make_shared<LeastSquaresProblem>(build_isotropic_quadratic(ps.n, ps.d, ps.curvature, pseed));
    else
      rls = std::make_shared<RobustLSProblem>(build_robust_ls(ps.n, ps.d, ps.d_y, rows, ps.alpha, pseed));
    ck.report("problem", true, std::string(to_string(ps.kind)));
  } catch (const std::exception& e) {
    ck.report("problem", false, e.what());
  }

  if (ls) {
    const auto& s = ls->smoothness();
    ck.report("smoothness", s.L_local >= s.L_global && s.L_global >= s.mu && s.mu > 0.0,
              "L_l=" + fmt(s.L_local) + " L_g=" + fmt(s.L_global) + " mu=" + fmt(s.mu));
    const auto [pl, qg] = sample_pl_qg(*ls, seed, 100);
    ck.report("pl_sampling", pl <= 1.0 + 1e-9, "max ratio " + fmt(pl));
    ck.report("qg_sampling", qg <= 1.0 + 1e-9, "max ratio " + fmt(qg));
  }
  if (rls) {
    const auto& s = rls->smoothness();
    ck.report("smoothness", s.mu_x > 0.0 && s.mu_y > 0.0,
              "mu_x=" + fmt(s.mu_x) + " mu_y=" + fmt(s.mu_y) + " L_x=" + fmt(s.L_x));
    const auto& sp = rls->saddle();
    const double scale = 1.0 + rls->lin_x().norm() + rls->lin_y().norm();
    ck.report("saddle_residual", sp.residual_x <= 1e-10 * scale && sp.residual_y <= 1e-10 * scale,
              "|grad_x|=" + fmt(sp.residual_x) + " |grad_y|=" + fmt(sp.residual_y) +
                  (sp.min_norm_fallback ? " (minimum-norm fallback)" : ""));
    if (s.mu_x > 0.0 && s.mu_y > 0.0) {
      const auto [px, py] = sample_pl_saddle(*rls, seed, 100);
      ck.report("pl_sampling", px <= 1.0 + 1e-9 && py <= 1.0 + 1e-9, "max ratio x " + fmt(px) + ", y " + fmt(py));
    }
  }

  try {
    GraphParams gp = c.graph.params;
    gp.seed = seed_for(c.graph.vary_with_seed, gp.seed, seed);
    const auto seq = make_graph_sequence(ps.n, c.graph.kind, gp);
    // every tau-window union must be connected
    std::int64_t broken = -1;
    for (std::size_t k = 0; k < seq.period() && broken < 0; ++k) {
      EdgeSet u;
      for (int s = 0; s < seq.tau(); ++s) {
        const auto& e = seq.edges_at(static_cast<std::int64_t>(k) + s);
        u.insert(u.end(), e.begin(), e.end());
      }
      if (!is_connected(ps.n, u)) broken = static_cast<std::int64_t>(k);
    }
    ck.report("graph", broken < 0,
              std::string(to_string(c.graph.kind)) + "/" + std::string(to_string(gp.base)) + ", period " +
                  std::to_string(seq.period()) +
                  (broken < 0 ? "" : ", window starting at k=" + std::to_string(broken) + " is disconnected"));
    const auto model = MixingModel::metropolis(seq);
    bool mixing_ok = true;
    std::string detail = std::to_string(seq.period()) + " matrices";
    for (std::size_t k = 0; k < seq.period(); ++k) {
      const auto rep = validate_mixing(model.mixing_matrix(static_cast<std::int64_t>(k)), seq,
                                       static_cast<std::int64_t>(k));
      if (!rep.passed()) {
        mixing_ok = false;
        for (const auto& chk : rep.checks)
          if (!chk.passed) detail = "k=" + std::to_string(k) + " " + chk.name + ": " + chk.detail;
        break;
      }
    }
    ck.report("mixing", mixing_ok, detail);
    try {
      const auto cal = MixingModel::calibrated(seq, c.graph.horizon);
      ck.report("contraction", true, "tau=" + std::to_string(cal.tau()) + " lambda=" + fmt(cal.lambda()));
    } catch (const NonContractiveError& e) {
      ck.report("contraction", false, e.what());
    }
  } catch (const std::exception& e) {
    ck.report("graph", false, e.what());
  }

  try {
    OracleSpec spec = c.oracle;
    spec.seed = seed;
    spec.validate();
    const int d = ls ? ls->dim() : ps.d;
    BiasedOracle oracle(spec, ps.n, d);
    const Matrix g = Matrix::Ones(ps.n, d);
    const auto smp = oracle.sample(g);
    const bool bias_ok = smp.bias.norm() <= spec.delta * (1.0 + 1e-12);
    ck.report("oracle", bias_ok, "|bias|=" + fmt(smp.bias.norm()) + " <= delta=" + fmt(spec.delta));
  } catch (const std::exception& e) {
    ck.report("oracle", false, e.what());
  }

  if (c.theory.auto_configure && (ls || rls)) {
    try {
      theory_report(c, true);
      ck.report("theory", true, "budget computed");
    } catch (const std::exception& e) {
      ck.report("theory", false, e.what());
    }
  }
  return ck.ok ? 0 : 1;
}

}  // namespace pldo::harness
