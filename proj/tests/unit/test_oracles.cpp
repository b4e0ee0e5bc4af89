#include <doctest.h>

#include <random>

#include "pldo/oracles.hpp"

using namespace pldo;

namespace {

Matrix random_matrix(int r, int c, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (int i = 0; i < m.size(); ++i) m(i) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("exact oracle returns its input bit for bit")
{
  OracleSpec spec;
  spec.delta = 0.0;
  spec.sigma = 0.0;
  CHECK(spec.exact());
  BiasedOracle o(spec, 4, 3);
  const Matrix g = random_matrix(4, 3, 1);
  const Matrix out = o.perturb(g);
  CHECK((out.array() == g.array()).all());
}

TEST_CASE("bias has Frobenius norm exactly delta")
{
  OracleSpec spec;
  spec.delta = 0.37;
  spec.sigma = 0.0;
  spec.seed = 11;
  for (auto mode : {BiasMode::FixedDirection, BiasMode::GradientAligned}) {
    spec.bias_mode = mode;
    BiasedOracle o(spec, 5, 2);
    for (int t = 0; t < 5; ++t) {
      const Matrix g = random_matrix(5, 2, 100 + t);
      const auto s = o.sample(g);
      CHECK(s.bias.norm() == doctest::Approx(0.37).epsilon(1e-14));
      CHECK(s.noise.norm() == 0.0);
      CHECK((s.gradient - g - s.bias).norm() < 1e-15);
    }
  }
}

TEST_CASE("gradient-aligned bias points along the gradient")
{
  OracleSpec spec;
  spec.delta = 0.5;
  spec.bias_mode = BiasMode::GradientAligned;
  spec.noise_mode = NoiseMode::Zero;
  BiasedOracle o(spec, 3, 3);
  const Matrix g = random_matrix(3, 3, 4);
  const auto s = o.sample(g);
  CHECK((s.bias - 0.5 * g / g.norm()).norm() < 1e-15);
  // zero gradient falls back to the fixed direction
  const auto z = o.sample(Matrix::Zero(3, 3));
  CHECK(z.bias.norm() == doctest::Approx(0.5));
}

TEST_CASE("noise is centered with second moment sigma^2")
{
  OracleSpec spec;
  spec.delta = 0.0;
  spec.sigma = 0.8;
  spec.seed = 3;
  spec.bias_mode = BiasMode::Zero;
  BiasedOracle o(spec, 4, 5);
  const Matrix g = Matrix::Zero(4, 5);
  const int draws = 20000;
  Matrix mean = Matrix::Zero(4, 5);
  double second = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto s = o.sample(g);
    mean += s.noise;
    second += s.noise.squaredNorm();
  }
  mean /= draws;
  second /= draws;
  const double ratio = second / (0.8 * 0.8);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
  // each entry has variance sigma^2/20; the sample mean is within a few standard errors
  CHECK(mean.cwiseAbs().maxCoeff() < 5.0 * 0.8 / std::sqrt(20.0 * draws));
}

TEST_CASE("same seed gives the same stream, different seeds differ")
{
  OracleSpec spec;
  spec.delta = 0.1;
  spec.sigma = 0.3;
  spec.seed = 77;
  BiasedOracle a(spec, 3, 2), b(spec, 3, 2);
  spec.seed = 78;
  BiasedOracle c(spec, 3, 2);
  const Matrix g = random_matrix(3, 2, 9);
  for (int t = 0; t < 10; ++t) {
    const Matrix ga = a.perturb(g), gb = b.perturb(g), gc = c.perturb(g);
    CHECK((ga.array() == gb.array()).all());
    CHECK((ga - gc).norm() > 0.0);
  }
}

TEST_CASE("derived seeds are distinct and stable")
{
  CHECK(derive_seed(1, 1) == derive_seed(1, 1));
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(1ULL << 40, 1) != derive_seed(0, 1));
}

TEST_CASE("spec validation and mode names")
{
  OracleSpec spec;
  spec.delta = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.delta = 0.0;
  spec.sigma = std::nan("");
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  for (auto m : {BiasMode::Zero, BiasMode::FixedDirection, BiasMode::GradientAligned})
    CHECK(parse_bias_mode(to_string(m)) == m);
  for (auto m : {NoiseMode::Zero, NoiseMode::GaussianIsotropic}) CHECK(parse_noise_mode(to_string(m)) == m);
  CHECK_FALSE(parse_bias_mode("sideways"));
}

TEST_CASE("stacked gradients have one row per node")
{
  const auto p = build_least_squares(3, 4, 2, 1);
  const Matrix x = random_matrix(3, 4, 2);
  const Matrix g = exact_stacked_gradient(p, StackedState(x));
  for (int i = 0; i < 3; ++i) CHECK((g.row(i).transpose() - p.node_gradient(i, x.row(i).transpose())).norm() == 0.0);
  CHECK_THROWS(exact_stacked_gradient(p, StackedState(2, 4)));
}
