#include "pldo/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pldo {

std::string_view to_string(BudgetMode mode)
{
  switch (mode) {
    case BudgetMode::Deterministic: return "deterministic";
    case BudgetMode::Stochastic: return "stochastic";
    case BudgetMode::SmallStep: return "stochastic_small_step";
    case BudgetMode::Saddle: return "saddle";
    case BudgetMode::SaddleStochastic: return "saddle_stochastic";
  }
  return "?";
}

namespace {

void require(bool ok, const std::string& what)
{
  if (!ok) throw std::invalid_argument(what);
}

void check_common(double eps, double delta_prime, double delta, double sigma)
{
  require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  require(delta_prime >= 0.0 && std::isfinite(delta_prime), "delta_prime must be >= 0");
  require(delta >= 0.0 && std::isfinite(delta), "delta must be >= 0");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be >= 0");
}

void check_profile(const SmoothnessProfile& p)
{
  require(p.nodes() > 0, "smoothness profile has no nodes");
  require(p.L_global > 0.0 && p.mu > 0.0, "L_g and mu must be positive");
}

// 1 - mu/L, clamped at 0 against rounding when mu == L.
double one_minus(double mu, double L)
{
  return std::max(0.0, 1.0 - mu / L);
}

}  // namespace

std::int64_t log_ceiling_iterations(double ratio, double gap, double eps)
{
  if (!(gap > eps)) return 0;
  return static_cast<std::int64_t>(std::ceil(ratio * std::log(gap / eps)));
}

std::optional<std::int64_t> consensus_rounds(const Contraction& c, double D, double delta_prime,
                                             std::vector<std::string>* notes)
{
  if (delta_prime <= 0.0) {
    if (notes) notes->push_back("delta_prime = 0: no finite round count guarantees exact consensus");
    return std::nullopt;
  }
  if (D <= delta_prime) {
    if (notes) notes->push_back("D <= delta_prime: consensus condition holds without communication, T = 0");
    return 0;
  }
  const double inner = std::ceil(std::log(D / delta_prime) / (2.0 * c.lambda));
  return static_cast<std::int64_t>(c.tau) * static_cast<std::int64_t>(inner);
}

TheoryBudget budget_min_deterministic(const SmoothnessProfile& p, const Contraction& mixing,
                                      const MinimizationInputs& in)
{
  check_profile(p);
  check_common(in.eps, in.delta_prime, in.delta, 0.0);
  require(in.f0_gap >= 0.0, "f0_gap must be >= 0");

  TheoryBudget b;
  b.mode = BudgetMode::Deterministic;
  b.eps = in.eps;
  b.delta_prime = in.delta_prime;
  b.f0_gap = in.f0_gap;
  const double n = p.nodes();
  const double gamma = 1.0 / p.L_global;
  b.gamma = gamma;
  b.Delta = in.delta + p.L_local * std::sqrt(in.delta_prime);

  const double F_gap = n * in.f0_gap;
  const double sqrt_D = gamma * in.grad_at_opt_norm + std::sqrt(in.delta_prime) + (gamma + 1.0 / p.mu) * b.Delta +
                        gamma * p.L_global * std::sqrt(2.0 / p.mu * one_minus(p.mu, p.L_global) * F_gap);
  b.D = sqrt_D * sqrt_D;

  b.N = log_ceiling_iterations(p.L_global / p.mu, in.f0_gap, in.eps);
  b.T = consensus_rounds(mixing, b.D, in.delta_prime, &b.notes);
  if (b.T) b.N_tot = b.N * *b.T;
  b.floor = b.Delta * b.Delta / (2.0 * p.mu * n);
  b.rate = p.mu / p.L_global;
  if (in.sigma > 0.0) b.notes.push_back("sigma > 0 ignored by the deterministic budget");
  return b;
}

TheoryBudget budget_min_stochastic(const SmoothnessProfile& p, const Contraction& mixing,
                                   const MinimizationInputs& in, std::optional<double> gamma)
{
  check_profile(p);
  check_common(in.eps, in.delta_prime, in.delta, in.sigma);
  require(in.f0_gap >= 0.0, "f0_gap must be >= 0");

  const double gamma_max = 1.0 / p.L_global;
  const double g = gamma.value_or(gamma_max);
  require(g > 0.0, "gamma must be positive");
  require(g <= gamma_max * (1.0 + 1e-12), "gamma must not exceed 1/L_g");
  const bool small = g < gamma_max * (1.0 - 1e-12);

  TheoryBudget b;
  b.mode = small ? BudgetMode::SmallStep : BudgetMode::Stochastic;
  b.eps = in.eps;
  b.delta_prime = in.delta_prime;
  b.f0_gap = in.f0_gap;
  b.expectation = true;
  b.gamma = g;
  const double n = p.nodes();
  const double Ll2 = p.L_local * p.L_local;
  const double d2 = in.delta * in.delta;
  const double s2 = in.sigma * in.sigma;

  // D is the same in both variants and is evaluated at gamma = 1/L_g
  const double delta2_full = 18.0 * (Ll2 * in.delta_prime + s2 + d2);
  const double gD = gamma_max;
  const double F_gap = n * in.f0_gap;
  b.D = 6.0 * gD * gD * in.grad_at_opt_norm * in.grad_at_opt_norm + 2.0 * in.delta_prime +
        6.0 * (gD * gD + 1.0 / (p.mu * p.mu)) * delta2_full +
        12.0 * gD * gD * p.L_global * p.L_global / p.mu * one_minus(p.mu, p.L_global) * F_gap;

  double delta2 = delta2_full;
  if (small) {
    delta2 = 2.0 * d2 + Ll2 * in.delta_prime + p.L_global * g * (16.0 * Ll2 * in.delta_prime + 18.0 * s2 + 16.0 * d2);
    b.N = log_ceiling_iterations(1.0 / (g * p.mu), in.f0_gap, in.eps);
    b.rate = g * p.mu;
    b.notes.push_back("small-step variant: N uses the (1 - gamma mu) rate");
  } else {
    b.N = log_ceiling_iterations(p.L_global / p.mu, in.f0_gap, in.eps);
    b.rate = p.mu / p.L_global;
  }
  b.Delta = std::sqrt(delta2);
  b.T = consensus_rounds(mixing, b.D, in.delta_prime, &b.notes);
  if (b.T) b.N_tot = b.N * *b.T;
  b.floor = delta2 / (2.0 * p.mu * n);
  return b;
}

double noise_floor(double delta, double sigma, double gamma, double mu, double L)
{
  return delta * delta / (2.0 * mu) + L * gamma * sigma * sigma / (2.0 * mu);
}

double noise_floor_bound(std::int64_t k, double gap0, double delta, double sigma, double gamma, double mu, double L)
{
  return std::pow(std::max(0.0, 1.0 - gamma * mu), static_cast<double>(k)) * gap0 +
         noise_floor(delta, sigma, gamma, mu, L);
}

double inner_drift_constant(const SaddleSmoothness& p, bool stochastic, double Delta_y, double delta_prime_y,
                            double grad_G_opt_norm, double G_gap, bool two_n)
{
  const double L = p.global.yy;
  const double gy = 1.0 / L;
  const double n = p.nodes();
  if (stochastic) {
    return 6.0 * gy * gy * grad_G_opt_norm * grad_G_opt_norm + 2.0 * delta_prime_y +
           6.0 * (gy * gy + 1.0 / (p.mu_y * p.mu_y)) * Delta_y * Delta_y +
           12.0 * gy * gy * L * L / p.mu_y * one_minus(p.mu_y, L) * G_gap;
  }
  const double factor = two_n ? 2.0 * n : 2.0;
  const double s = gy * grad_G_opt_norm + std::sqrt(delta_prime_y) + (gy + 1.0 / p.mu_y) * Delta_y +
                   gy * L * std::sqrt(factor / p.mu_y * one_minus(p.mu_y, L) * G_gap);
  return s * s;
}

SaddleBudget budget_saddle(const SaddleSmoothness& p, const Contraction& mixing_x, const Contraction& mixing_y,
                           const SaddleInputs& in, bool stochastic)
{
  require(p.nodes() > 0, "saddle profile has no nodes");
  require(p.mu_x > 0.0 && p.mu_y > 0.0, "mu_x and mu_y must be positive");
  require(p.global.yy > 0.0 && p.L_x > 0.0, "L_yy,g and L_x must be positive");
  check_common(in.eps_x, in.delta_prime_x, in.delta, in.sigma);
  check_common(in.eps_y, in.delta_prime_y, in.delta, in.sigma);

  SaddleBudget b;
  b.mode = stochastic ? BudgetMode::SaddleStochastic : BudgetMode::Saddle;
  b.eps_x = in.eps_x;
  b.eps_y = in.eps_y;
  b.delta_prime_x = in.delta_prime_x;
  b.delta_prime_y = in.delta_prime_y;
  b.L_x = p.L_x;
  b.gamma_x = 1.0 / p.L_x;
  b.gamma_y = 1.0 / p.global.yy;

  const double n = p.nodes();
  const auto& l = p.local;
  const double sdx = std::sqrt(in.delta_prime_x), sdy = std::sqrt(in.delta_prime_y);
  const double d2 = in.delta * in.delta, s2 = in.sigma * in.sigma;

  if (stochastic) {
    const double dy2 =
        19.0 * (l.yy * l.yy * in.delta_prime_y + l.yx * l.yx * in.delta_prime_x + s2 + d2);
    const double dx2 = 22.0 * l.xy * l.xy * in.delta_prime_y + 19.0 * l.xx * l.xx * in.delta_prime_x + 19.0 * d2 +
                       18.0 * s2 +
                       6.0 * l.xy * l.xy * (2.0 * in.eps_y / p.mu_y + dy2 / (p.mu_y * p.mu_y * n));
    b.Delta_y = std::sqrt(dy2);
    b.Delta_x = std::sqrt(dx2);
  } else {
    if (in.sigma > 0.0) b.notes.push_back("sigma > 0 ignored by the deterministic saddle budget");
    b.Delta_y = in.delta + l.yy * sdy + l.yx * sdx;
    b.Delta_x = in.delta + l.xx * sdx +
                l.xy * (std::sqrt(in.eps_y / (2.0 * p.mu_y)) + b.Delta_y / (2.0 * p.mu_y * std::sqrt(n)) + sdy);
  }
  b.floor_x = b.Delta_x * b.Delta_x / (2.0 * p.mu_x * n);
  b.floor_y = b.Delta_y * b.Delta_y / (2.0 * p.mu_y * n);

  if (in.F_gap && in.grad_F_opt_norm) {
    const double gx = b.gamma_x, g = *in.grad_F_opt_norm, Fg = *in.F_gap;
    if (stochastic) {
      b.D_X = 6.0 * gx * gx * g * g + 2.0 * in.delta_prime_x +
              6.0 * (gx * gx + 1.0 / (p.mu_x * p.mu_x)) * b.Delta_x * b.Delta_x +
              12.0 * gx * gx * p.L_x * p.L_x / p.mu_x * one_minus(p.mu_x, p.L_x) * Fg;
    } else {
      const double s = gx * g + sdx + (gx + 1.0 / p.mu_x) * b.Delta_x +
                       gx * p.L_x * std::sqrt(2.0 / p.mu_x * one_minus(p.mu_x, p.L_x) * Fg);
      b.D_X = s * s;
    }
  } else {
    b.notes.push_back("D_X needs F_gap and |grad F(X*)|");
  }

  std::optional<double> dy;
  std::optional<double> dy_alt;
  for (double v : in.inner_drifts) dy = std::max(dy.value_or(v), v);
  if (in.G_gap && in.grad_G_opt_norm) {
    const double v =
        inner_drift_constant(p, stochastic, b.Delta_y, in.delta_prime_y, *in.grad_G_opt_norm, *in.G_gap, true);
    dy = std::max(dy.value_or(v), v);
    if (!stochastic)
      dy_alt = inner_drift_constant(p, false, b.Delta_y, in.delta_prime_y, *in.grad_G_opt_norm, *in.G_gap, false);
  }
  b.D_Y = dy;
  b.D_Y_alt = dy_alt;
  if (!b.D_Y) b.notes.push_back("D_Y needs G_gap and |grad G(Y*)| or realized inner drifts");

  if (in.F_gap) b.N_x = log_ceiling_iterations(p.L_x / p.mu_x, *in.F_gap, in.eps_x);
  if (in.G_gap) b.N_y = log_ceiling_iterations(p.global.yy / p.mu_y, *in.G_gap, in.eps_y);
  if (b.D_X) b.T_x = consensus_rounds(mixing_x, *b.D_X, in.delta_prime_x, &b.notes);
  if (b.D_Y) b.T_y = consensus_rounds(mixing_y, *b.D_Y, in.delta_prime_y, &b.notes);
  if (b.N_x && b.N_y && b.T_x && b.T_y) b.T_tot = *b.N_x * *b.T_x + *b.N_y * *b.N_x * *b.T_y;
  b.usable = b.N_x && b.N_y && b.T_x && b.T_y;
  if (!b.usable) b.notes.push_back("budget incomplete: not usable for auto-configuration");
  return b;
}

double overlay_bound_at(const TheoryBudget& budget, std::int64_t k)
{
  return std::pow(std::max(0.0, 1.0 - budget.rate), static_cast<double>(k)) * budget.f0_gap + budget.floor;
}

OverlayTrace overlay_bounds(const RunRecord& record, const TheoryBudget& budget, double rel_tol)
{
  OverlayTrace out;
  // f_gap is a difference of two values of size ~|f*|
  const double abs_tol = 1e-13 * (1.0 + std::abs(record.f_star));
  for (const auto& pt : record.points) {
    const double bound = overlay_bound_at(budget, pt.k);
    out.k.push_back(pt.k);
    out.bound.push_back(bound);
    out.measured.push_back(pt.f_gap);
    if (pt.f_gap > bound * (1.0 + rel_tol) + abs_tol) out.violations.push_back(out.k.size() - 1);
  }
  return out;
}

}  // namespace pldo
