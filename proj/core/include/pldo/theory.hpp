#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pldo/algorithms.hpp"
#include "pldo/problems.hpp"
#include "pldo/topology.hpp"

namespace pldo {

enum class BudgetMode { Deterministic, Stochastic, SmallStep, Saddle, SaddleStochastic };
std::string_view to_string(BudgetMode mode);

/// Targets and problem-dependent scalars of a minimization budget.
/// f0_gap is f(x_bar^0) - f*; grad_at_opt_norm is |grad F(X_bar*)| on the
/// stacked optimum.
struct MinimizationInputs {
  double eps = 0.0;
  double delta_prime = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  double f0_gap = 0.0;
  double grad_at_opt_norm = 0.0;
};

struct TheoryBudget {
  BudgetMode mode = BudgetMode::Deterministic;
  double gamma = 0.0;
  std::int64_t N = 0;
  /// Empty when delta_prime = 0 (no finite round count reaches it).
  std::optional<std::int64_t> T;
  std::optional<std::int64_t> N_tot;
  double D = 0.0;
  double Delta = 0.0;
  double floor = 0.0;
  double eps = 0.0;
  double delta_prime = 0.0;
  /// Per-iteration contraction of the gap bound: 1 - rate.
  double rate = 0.0;
  double f0_gap = 0.0;
  /// Guarantees hold in expectation only.
  bool expectation = false;
  std::vector<std::string> notes;
};

/// ceil(ratio * ln(gap / eps)), 0 once gap <= eps.
std::int64_t log_ceiling_iterations(double ratio, double gap, double eps);

/// tau * ceil(ln(D / delta') / (2 lambda)); 0 with a note if D <= delta',
/// empty if delta' = 0.
std::optional<std::int64_t> consensus_rounds(const Contraction& c, double D, double delta_prime,
                                             std::vector<std::string>* notes = nullptr);

/// Budget for the deterministic biased oracle with gamma = 1/L_g.
TheoryBudget budget_min_deterministic(const SmoothnessProfile& profile, const Contraction& mixing,
                                      const MinimizationInputs& in);

/// (delta, sigma^2) oracle. A gamma below 1/L_g selects the small-step
/// variant; gamma above 1/L_g is rejected.
TheoryBudget budget_min_stochastic(const SmoothnessProfile& profile, const Contraction& mixing,
                                   const MinimizationInputs& in, std::optional<double> gamma = std::nullopt);

/// delta^2/(2 mu) + L gamma sigma^2/(2 mu)
double noise_floor(double delta, double sigma, double gamma, double mu, double L);
/// (1 - gamma mu)^k gap0 + noise_floor(...)
double noise_floor_bound(std::int64_t k, double gap0, double delta, double sigma, double gamma, double mu, double L);

/// Problem-dependent scalars of a saddle budget, all on the stacked problem.
/// Missing values leave the dependent budget fields empty.
struct SaddleInputs {
  double eps_x = 0.0;
  double eps_y = 0.0;
  double delta_prime_x = 0.0;
  double delta_prime_y = 0.0;
  double delta = 0.0;
  double sigma = 0.0;
  /// F(X_bar^0) - F*
  std::optional<double> F_gap;
  /// G*_{x_bar} - G_{x_bar}(Y_bar^0)
  std::optional<double> G_gap;
  /// |grad F(X_bar*)|
  std::optional<double> grad_F_opt_norm;
  /// |grad G_{x_bar}(Y_bar*)|
  std::optional<double> grad_G_opt_norm;
  /// Realized D_{X^k,Y} values, folded into D_Y by max.
  std::vector<double> inner_drifts;
};

struct SaddleBudget {
  BudgetMode mode = BudgetMode::Saddle;
  double L_x = 0.0;
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double Delta_x = 0.0;
  double Delta_y = 0.0;
  double eps_x = 0.0, eps_y = 0.0;
  double delta_prime_x = 0.0, delta_prime_y = 0.0;
  std::optional<double> D_X;
  std::optional<double> D_Y;
  /// D_Y with 2/mu_y in place of 2n/mu_y inside the gap term (deterministic mode).
  std::optional<double> D_Y_alt;
  std::optional<std::int64_t> N_x, N_y, T_x, T_y, T_tot;
  double floor_x = 0.0;
  double floor_y = 0.0;
  /// False when some input was missing and the counts cannot configure a run.
  bool usable = true;
  std::vector<std::string> notes;
};

SaddleBudget budget_saddle(const SaddleSmoothness& profile, const Contraction& mixing_x,
                           const Contraction& mixing_y, const SaddleInputs& in, bool stochastic);

/// D_{X,Y} for one outer iterate. `two_n` picks the printed 2n/mu_y factor of
/// the deterministic form; the stochastic form ignores it.
double inner_drift_constant(const SaddleSmoothness& profile, bool stochastic, double Delta_y, double delta_prime_y,
                            double grad_G_opt_norm, double G_gap, bool two_n = true);

struct OverlayTrace {
  std::vector<std::int64_t> k;
  std::vector<double> bound;
  std::vector<double> measured;
  /// Indices into k where measured exceeds bound beyond tolerance.
  std::vector<std::size_t> violations;
};

/// (1 - rate)^k gap0 + floor at every recorded k, compared against the trace.
OverlayTrace overlay_bounds(const RunRecord& record, const TheoryBudget& budget, double rel_tol = 1e-9);
double overlay_bound_at(const TheoryBudget& budget, std::int64_t k);

}  // namespace pldo
