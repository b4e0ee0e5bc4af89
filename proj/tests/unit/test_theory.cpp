#include <doctest.h>

#include <cmath>

#include "pldo/theory.hpp"

using namespace pldo;

namespace {

SmoothnessProfile profile(int n, double L, double mu)
{
  return SmoothnessProfile::from(std::vector<double>(static_cast<std::size_t>(n), L), mu);
}

SaddleSmoothness saddle_profile(int n)
{
  SaddleSmoothness s;
  SaddleSmoothness::Node node{4.0, 1.5, 1.5, 2.0};
  s.per_node.assign(static_cast<std::size_t>(n), node);
  s.local = node;
  s.global = {3.0, 1.0, 1.0, 1.5};
  s.mu_x = 0.5;
  s.mu_y = 0.25;
  s.L_x = s.global.xx + s.global.xy / s.mu_y;
  return s;
}

}  // namespace

TEST_CASE("iteration count from the log ceiling")
{
  MinimizationInputs in;
  in.eps = 1.0;
  in.f0_gap = 100.0;
  in.delta_prime = 1e-6;
  const auto b = budget_min_deterministic(profile(3, 10.0, 1.0), {1, 0.5}, in);
  CHECK(b.N == 47);
  CHECK(b.gamma == doctest::Approx(0.1));
  CHECK(log_ceiling_iterations(10.0, 1.0, 1.0) == 0);
}

TEST_CASE("exact oracle and exact consensus give no floor")
{
  MinimizationInputs in;
  in.eps = 1e-3;
  in.f0_gap = 1.0;
  in.delta_prime = 0.0;
  const auto b = budget_min_deterministic(profile(4, 2.0, 1.0), {1, 0.5}, in);
  CHECK(b.Delta == 0.0);
  CHECK(b.floor == 0.0);
  CHECK_FALSE(b.T.has_value());
  CHECK_FALSE(b.notes.empty());
}

TEST_CASE("deterministic D by hand")
{
  const int n = 3;
  const double L = 4.0, mu = 1.0;
  MinimizationInputs in;
  in.eps = 1e-4;
  in.delta_prime = 1e-4;
  in.delta = 0.2;
  in.f0_gap = 2.0;
  in.grad_at_opt_norm = 0.7;
  const auto b = budget_min_deterministic(profile(n, L, mu), {2, 0.25}, in);
  const double g = 0.25, Delta = 0.2 + 4.0 * 0.01;
  const double s = g * 0.7 + 0.01 + (g + 1.0) * Delta + g * L * std::sqrt(2.0 * (1.0 - 0.25) * 3.0 * 2.0);
  CHECK(b.Delta == doctest::Approx(Delta));
  CHECK(b.D == doctest::Approx(s * s));
  CHECK(b.floor == doctest::Approx(Delta * Delta / (2.0 * 3.0)));
  CHECK(*b.T == 2 * static_cast<std::int64_t>(std::ceil(std::log(s * s / 1e-4) / 0.5)));
  CHECK(*b.N_tot == b.N * *b.T);
}

TEST_CASE("complete graph needs few rounds")
{
  MinimizationInputs in;
  in.eps = 1e-6;
  in.delta_prime = 1e-8;
  in.f0_gap = 1.0;
  in.grad_at_opt_norm = 1.0;
  const auto b = budget_min_deterministic(profile(5, 1.0, 1.0), {1, 1.0}, in);
  CHECK(*b.T == static_cast<std::int64_t>(std::ceil(0.5 * std::log(b.D / 1e-8))));
  CHECK(*b.T < 20);
}

TEST_CASE("D <= delta' gives zero rounds with a note")
{
  std::vector<std::string> notes;
  CHECK(consensus_rounds({3, 0.1}, 1e-3, 1e-2, &notes) == 0);
  CHECK(notes.size() == 1);
  CHECK(consensus_rounds({3, 0.1}, 1.0, 0.0) == std::nullopt);
}

TEST_CASE("stochastic budget with exact oracle reduces to two terms")
{
  const int n = 4;
  const double L = 3.0, mu = 1.0;
  MinimizationInputs in;
  in.eps = 1e-3;
  in.f0_gap = 0.5;
  in.grad_at_opt_norm = 1.2;
  const auto b = budget_min_stochastic(profile(n, L, mu), {1, 0.3}, in);
  const double g = 1.0 / L;
  CHECK(b.Delta == 0.0);
  CHECK(b.D == doctest::Approx(6 * g * g * 1.44 + 12 * g * g * L * L / mu * (1 - mu / L) * n * 0.5));
  CHECK(b.expectation);
  CHECK(b.mode == BudgetMode::Stochastic);
}

TEST_CASE("small-step variant at gamma = 1/(2 L_g)")
{
  const int n = 2;
  const double L = 2.0, mu = 0.5, gamma = 0.25;
  MinimizationInputs in;
  in.eps = 1e-4;
  in.delta_prime = 1e-4;
  in.delta = 0.1;
  in.sigma = 0.3;
  in.f0_gap = 1.0;
  const auto b = budget_min_stochastic(profile(n, L, mu), {1, 0.5}, in, gamma);
  CHECK(b.mode == BudgetMode::SmallStep);
  const double d2 = 2 * 0.01 + 4.0 * 1e-4 + L * gamma * (16 * 4.0 * 1e-4 + 18 * 0.09 + 16 * 0.01);
  CHECK(b.Delta * b.Delta == doctest::Approx(d2));
  CHECK(b.floor == doctest::Approx(d2 / (2 * mu * n)));
  CHECK(b.N == static_cast<std::int64_t>(std::ceil(1.0 / (gamma * mu) * std::log(1e4))));
  CHECK_THROWS_AS(budget_min_stochastic(profile(n, L, mu), {1, 0.5}, in, 1.0), std::invalid_argument);
}

TEST_CASE("noise floor")
{
  CHECK(noise_floor(0.1, 0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.005));
  CHECK(noise_floor_bound(0, 2.0, 0.1, 0.0, 1.0, 1.0, 1.0) == doctest::Approx(2.005));
}

TEST_CASE("monotonicity of the minimization budget")
{
  const auto p = profile(3, 5.0, 1.0);
  MinimizationInputs in;
  in.f0_gap = 1.0;
  in.grad_at_opt_norm = 0.5;
  in.delta_prime = 1e-6;
  in.eps = 1e-3;
  const auto a = budget_min_deterministic(p, {1, 0.2}, in);
  in.eps = 1e-6;
  const auto b = budget_min_deterministic(p, {1, 0.2}, in);
  CHECK(b.N >= a.N);
  in.delta_prime = 1e-9;
  const auto c = budget_min_deterministic(p, {1, 0.2}, in);
  CHECK(*c.T >= *b.T);
  in.delta = 0.3;
  const auto d = budget_min_deterministic(p, {1, 0.2}, in);
  CHECK(d.floor >= c.floor);
  CHECK(*d.T >= *c.T);
}

TEST_CASE("budgets are pure")
{
  MinimizationInputs in{1e-5, 1e-6, 0.1, 0.2, 3.0, 0.4};
  const auto a = budget_min_stochastic(profile(3, 2.0, 0.5), {2, 0.1}, in);
  const auto b = budget_min_stochastic(profile(3, 2.0, 0.5), {2, 0.1}, in);
  CHECK(a.D == b.D);
  CHECK(a.Delta == b.Delta);
  CHECK(a.T == b.T);
}

TEST_CASE("saddle: inner inexactness alone drives the outer bias")
{
  const auto s = saddle_profile(4);
  SaddleInputs in;
  in.eps_x = 1e-3;
  in.eps_y = 0.5;
  const auto b = budget_saddle(s, {1, 0.5}, {1, 0.5}, in, false);
  CHECK(b.Delta_y == 0.0);
  CHECK(b.Delta_x == doctest::Approx(1.5 * std::sqrt(0.5 / (2 * 0.25))));
  CHECK_FALSE(b.usable);
}

TEST_CASE("saddle: outer times inner count tracks log^2")
{
  const auto s = saddle_profile(3);
  auto counts = [&](double eps) {
    SaddleInputs in;
    in.eps_x = in.eps_y = eps;
    in.delta_prime_x = in.delta_prime_y = 1e-8;
    in.F_gap = 1.0;
    in.G_gap = 1.0;
    in.grad_F_opt_norm = 0.1;
    in.grad_G_opt_norm = 0.1;
    const auto b = budget_saddle(s, {1, 0.5}, {1, 0.5}, in, false);
    REQUIRE(b.usable);
    return static_cast<double>(*b.N_x * *b.N_y);
  };
  const double eps = 1e-6;
  const double measured = counts(eps / 10) / counts(eps);
  const double predicted = std::pow(std::log(10 / eps) / std::log(1 / eps), 2);
  CHECK(std::abs(measured / predicted - 1.0) < 0.1);
}

TEST_CASE("saddle: totals and round counts")
{
  const auto s = saddle_profile(3);
  SaddleInputs in;
  in.eps_x = 1e-4;
  in.eps_y = 1e-5;
  in.delta_prime_x = 1e-6;
  in.delta_prime_y = 1e-7;
  in.delta = 0.01;
  in.F_gap = 2.0;
  in.G_gap = 3.0;
  in.grad_F_opt_norm = 0.2;
  in.grad_G_opt_norm = 0.3;
  for (bool stochastic : {false, true}) {
    in.sigma = stochastic ? 0.05 : 0.0;
    const auto b = budget_saddle(s, {2, 0.4}, {3, 0.3}, in, stochastic);
    REQUIRE(b.usable);
    CHECK(*b.T_tot == *b.N_x * *b.T_x + *b.N_y * *b.N_x * *b.T_y);
    CHECK(*b.T_x % 2 == 0);
    CHECK(*b.T_y % 3 == 0);
    CHECK(*b.N_x == static_cast<std::int64_t>(std::ceil(s.L_x / s.mu_x * std::log(2.0 / 1e-4))));
    CHECK(*b.N_y == static_cast<std::int64_t>(std::ceil(1.5 / 0.25 * std::log(3.0 / 1e-5))));
    if (stochastic) {
      const double dy2 = 19 * (4.0 * 1e-7 + 2.25 * 1e-6 + 0.0025 + 1e-4);
      CHECK(b.Delta_y * b.Delta_y == doctest::Approx(dy2));
    } else {
      CHECK(b.Delta_y == doctest::Approx(0.01 + 2.0 * std::sqrt(1e-7) + 1.5 * 1e-3));
      CHECK(b.D_Y_alt.has_value());
      CHECK(*b.D_Y_alt <= *b.D_Y);
    }
  }
}

TEST_CASE("realized inner drifts raise D_Y")
{
  const auto s = saddle_profile(2);
  SaddleInputs in;
  in.eps_x = in.eps_y = 1e-3;
  in.inner_drifts = {0.5, 7.0, 2.0};
  const auto b = budget_saddle(s, {1, 0.5}, {1, 0.5}, in, false);
  CHECK(*b.D_Y == 7.0);
}

TEST_CASE("overlay flags violations only")
{
  RunRecord rec;
  rec.initial_f_gap = 1.0;
  for (int k = 1; k <= 3; ++k) {
    TracePoint p;
    p.k = k;
    p.f_gap = std::pow(0.5, k);
    rec.points.push_back(p);
  }
  TheoryBudget b;
  b.rate = 0.5;
  b.f0_gap = 1.0;
  CHECK(overlay_bound_at(b, 0) == 1.0);
  CHECK(overlay_bounds(rec, b).violations.empty());
  b.rate = 0.6;
  CHECK(overlay_bounds(rec, b).violations.size() == 3);
}
