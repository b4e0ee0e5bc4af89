#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pldo/problems.hpp"

using namespace pldo;

namespace {

Vector randn(int d, std::mt19937_64& rng)
{
  std::normal_distribution<double> g;
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = g(rng);
  return v;
}

}  // namespace

TEST_CASE("least squares: identity node")
{
  LeastSquaresProblem p({{Matrix::Identity(3, 3), Vector::Zero(3)}});
  CHECK(p.minimizer()->norm() == 0.0);
  CHECK(*p.optimal_value() == 0.0);
  CHECK(p.smoothness().mu == doctest::Approx(1.0));
  CHECK(p.smoothness().L_local == doctest::Approx(1.0));
}

TEST_CASE("least squares: rank-deficient sum gives mu = 1/2")
{
  Matrix a1(1, 2), a2(1, 2);
  a1 << 1, 0;
  a2 << 0, 0;
  LeastSquaresProblem p({{a1, Vector::Ones(1)}, {a2, Vector::Ones(1)}});
  CHECK(p.smoothness().mu == doctest::Approx(0.5));
  const auto ev = oracle::jacobi_eigenvalues(p.hessian());
  CHECK(oracle::smallest_nonzero(ev) == doctest::Approx(0.5));
  CHECK(ev.front() == doctest::Approx(0.0));
}

TEST_CASE("least squares: constants and optimum against independent oracles")
{
  const auto p = build_least_squares(5, 4, 3, 17);
  const auto& s = p.smoothness();
  CHECK(s.L_local >= s.L_global);
  CHECK(s.L_global >= s.mu);
  for (int i = 0; i < p.nodes(); ++i) {
    const Matrix ata = p.node(i).A.transpose() * p.node(i).A;
    CHECK(s.L_per_node[static_cast<std::size_t>(i)] ==
          doctest::Approx(oracle::jacobi_eigenvalues(ata).back()).epsilon(1e-10));
  }
  CHECK(s.mu == doctest::Approx(oracle::smallest_nonzero(oracle::jacobi_eigenvalues(p.hessian()))).epsilon(1e-10));

  const Vector x = oracle::long_run_gd([&](const Vector& v) { return p.gradient(v); }, Vector::Zero(4),
                                       1.0 / s.L_global, 200000);
  CHECK(std::abs(p.value(x) - *p.optimal_value()) < 1e-8);
}

TEST_CASE("least squares: gradients match finite differences")
{
  const auto p = build_least_squares(3, 5, 4, 2);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const Vector x = randn(5, rng);
    for (int i = 0; i < 3; ++i) {
      const Vector fd = oracle::fd_gradient([&](const Vector& v) { return p.node_value(i, v); }, x);
      CHECK(oracle::rel_error(p.node_gradient(i, x), fd) <= 1e-5);
    }
  }
}

TEST_CASE("isotropic quadratic has L = mu = curvature")
{
  const auto p = build_isotropic_quadratic(4, 3, 2.5, 1);
  CHECK(p.smoothness().L_local == doctest::Approx(2.5));
  CHECK(p.smoothness().L_global == doctest::Approx(2.5));
  CHECK(p.smoothness().mu == doctest::Approx(2.5));
}

TEST_CASE("robust LS rejects alpha <= 1")
{
  CHECK_THROWS_AS(build_robust_ls(3, 2, 2, 2, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_robust_ls(3, 2, 2, 2, 0.5, 0), std::invalid_argument);
}

TEST_CASE("robust LS gradients and Danskin gradient match finite differences")
{
  const auto p = build_robust_ls(4, 3, 2, 3, 2.0, 5);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const Vector x = randn(3, rng), y = randn(2, rng);
    for (int i = 0; i < 4; ++i) {
      const Vector fx = oracle::fd_gradient([&](const Vector& v) { return p.node_value(i, v, y); }, x);
      const Vector fy = oracle::fd_gradient([&](const Vector& v) { return p.node_value(i, x, v); }, y);
      CHECK(oracle::rel_error(p.node_grad_x(i, x, y), fx) <= 1e-5);
      CHECK(oracle::rel_error(p.node_grad_y(i, x, y), fy) <= 1e-5);
    }
    const Vector fe = oracle::fd_gradient([&](const Vector& v) { return p.envelope_value(v); }, x);
    CHECK(oracle::rel_error(p.envelope_gradient(x), fe) <= 1e-4);
  }
}

TEST_CASE("scalar saddle solved by hand")
{
  // phi = 1/2 (a x - y0 - b y)^2 - (alpha/2) b^2 y^2 ; stationarity gives y = 0 and a x = y0
  const double a = 2.0, b = 3.0, y0 = 4.0, alpha = 3.0;
  RobustLSProblem p({{Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Vector::Constant(1, y0)}}, alpha);
  const auto& s = p.saddle();
  CHECK(s.x(0) == doctest::Approx(y0 / a));
  CHECK(s.y(0) == doctest::Approx(0.0));
  CHECK(s.value == doctest::Approx(0.0));
  CHECK_FALSE(s.min_norm_fallback);
}

TEST_CASE("analytic saddle: residuals and long-run GDA")
{
  const auto p = build_robust_ls(3, 2, 2, 2, 2.0, 42);
  const auto& s = p.saddle();
  CHECK(s.residual_x <= 1e-10);
  CHECK(s.residual_y <= 1e-10);

  const auto& prof = p.smoothness();
  Vector x = Vector::Zero(2), y = Vector::Zero(2);
  const double gx = 0.5 / prof.L_x, gy = 1.0 / prof.global.yy;
  for (int k = 0; k < 100000; ++k) {
    for (int j = 0; j < 20; ++j) y += gy * p.grad_y(x, y);
    x -= gx * p.grad_x(x, y);
  }
  CHECK((x - s.x).norm() <= 1e-6);
  CHECK((y - s.y).norm() <= 1e-6);
}

TEST_CASE("B = 0 reduces to least squares with y* = 0")
{
  std::mt19937_64 rng(4);
  std::vector<RobustLSNode> nodes;
  std::vector<QuadraticNode> ls_nodes;
  std::normal_distribution<double> g;
  for (int i = 0; i < 3; ++i) {
    Matrix a(3, 2);
    for (int k = 0; k < a.size(); ++k) a(k) = g(rng);
    const Vector y0 = randn(3, rng);
    nodes.push_back({a, Matrix::Zero(3, 2), y0});
    ls_nodes.push_back({a, y0});
  }
  const RobustLSProblem p(nodes, 2.0);
  const LeastSquaresProblem ls(ls_nodes);
  CHECK(p.saddle().min_norm_fallback);
  CHECK((p.saddle().x - *ls.minimizer()).norm() < 1e-10);
  CHECK(p.saddle().y.norm() < 1e-14);
  CHECK(p.inner(Vector::Ones(2)).degenerate());
  CHECK(p.grad_y(Vector::Ones(2), Vector::Ones(2)).norm() == 0.0);
}

TEST_CASE("inner objective")
{
  const auto p = build_robust_ls(5, 3, 3, 3, 2.0, 8);
  std::mt19937_64 rng(1);
  const Vector x = randn(3, rng);
  const auto inner = p.inner(x);
  CHECK(inner.gradient(inner.maximizer()).norm() <= 1e-10);
  CHECK(inner.gap(randn(3, rng)) >= 0.0);
  const auto at_star = p.inner(p.saddle().x);
  CHECK(at_star.max_value() == doctest::Approx(p.saddle().value).epsilon(1e-10));

  const StackedState ys = StackedState::replicate(inner.maximizer(), p.nodes());
  CHECK(inner.stacked_max_value() == doctest::Approx(inner.stacked_value(ys)));
  CHECK(inner.stacked_gradient(ys).colwise().sum().norm() <= 1e-9);
}

TEST_CASE("PL constants include the 1/n of the mean objective")
{
  const auto p = build_robust_ls(4, 3, 3, 3, 2.0, 3);
  const auto& s = p.smoothness();
  CHECK(s.mu_x_unnormalized == doctest::Approx(4.0 * s.mu_x));
  CHECK(s.L_x == doctest::Approx(s.global.xx + s.global.xy / s.mu_y));
  Matrix sum_ata = Matrix::Zero(3, 3);
  for (int i = 0; i < 4; ++i) sum_ata += p.node(i).A.transpose() * p.node(i).A;
  CHECK(s.mu_x_unnormalized ==
        doctest::Approx(oracle::smallest_nonzero(oracle::jacobi_eigenvalues(sum_ata))).epsilon(1e-10));
}
