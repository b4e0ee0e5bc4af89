#include "pldo/oracles.hpp"

#include <cmath>
#include <string>

namespace pldo {

std::string_view to_string(BiasMode mode)
{
  switch (mode) {
    case BiasMode::Zero: return "zero";
    case BiasMode::FixedDirection: return "fixed_direction";
    case BiasMode::GradientAligned: return "gradient_aligned";
  }
  return "?";
}

std::string_view to_string(NoiseMode mode)
{
  switch (mode) {
    case NoiseMode::Zero: return "zero";
    case NoiseMode::GaussianIsotropic: return "gaussian_isotropic";
  }
  return "?";
}

std::optional<BiasMode> parse_bias_mode(std::string_view name)
{
  for (auto m : {BiasMode::Zero, BiasMode::FixedDirection, BiasMode::GradientAligned})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::optional<NoiseMode> parse_noise_mode(std::string_view name)
{
  for (auto m : {NoiseMode::Zero, NoiseMode::GaussianIsotropic})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

void OracleSpec::validate() const
{
  if (!std::isfinite(delta) || delta < 0.0)
    throw std::invalid_argument("oracle delta must be finite and >= 0 (got " + std::to_string(delta) + ")");
  if (!std::isfinite(sigma) || sigma < 0.0)
    throw std::invalid_argument("oracle sigma must be finite and >= 0 (got " + std::to_string(sigma) + ")");
}

bool OracleSpec::exact() const
{
  const bool no_bias = delta == 0.0 || bias_mode == BiasMode::Zero;
  const bool no_noise = sigma == 0.0 || noise_mode == NoiseMode::Zero;
  return no_bias && no_noise;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t{words[0]} << 32) | words[1];
}

Matrix exact_stacked_gradient(const DistributedObjective& problem, const StackedState& x)
{
  if (x.nodes() != problem.nodes() || x.dim() != problem.dim())
    throw std::invalid_argument("stacked state is " + std::to_string(x.nodes()) + "x" + std::to_string(x.dim()) +
                                ", problem expects " + std::to_string(problem.nodes()) + "x" +
                                std::to_string(problem.dim()));
  Matrix g(x.nodes(), x.dim());
  for (int i = 0; i < x.nodes(); ++i) g.row(i) = problem.node_gradient(i, x.row(i)).transpose();
  return g;
}

namespace {

void check_saddle_shapes(const RobustLSProblem& p, const StackedState& x, const StackedState& y)
{
  if (x.nodes() != p.nodes() || y.nodes() != p.nodes() || x.dim() != p.dim_x() || y.dim() != p.dim_y())
    throw std::invalid_argument("stacked saddle state does not match the problem dimensions");
}

}  // namespace

Matrix exact_stacked_grad_x(const RobustLSProblem& problem, const StackedState& x, const StackedState& y)
{
  check_saddle_shapes(problem, x, y);
  Matrix g(x.nodes(), x.dim());
  for (int i = 0; i < x.nodes(); ++i) g.row(i) = problem.node_grad_x(i, x.row(i), y.row(i)).transpose();
  return g;
}

Matrix exact_stacked_grad_y(const RobustLSProblem& problem, const StackedState& x, const StackedState& y)
{
  check_saddle_shapes(problem, x, y);
  Matrix g(y.nodes(), y.dim());
  for (int i = 0; i < y.nodes(); ++i) g.row(i) = problem.node_grad_y(i, x.row(i), y.row(i)).transpose();
  return g;
}

BiasedOracle::BiasedOracle(const OracleSpec& spec, int nodes, int dim) : spec_(spec)
{
  spec_.validate();
  // separate streams for the bias direction and the per-call noise
  std::mt19937_64 dir_rng(derive_seed(spec_.seed, 0xb1a5));
  rng_.seed(derive_seed(spec_.seed, 0x7015e));

  direction_.resize(nodes, dim);
  for (int r = 0; r < nodes; ++r)
    for (int c = 0; c < dim; ++c) direction_(r, c) = gauss_(dir_rng);
  gauss_.reset();
  const double norm = direction_.norm();
  if (norm > 0.0) direction_ /= norm;
}

OracleSample BiasedOracle::sample(const Matrix& exact)
{
  if (exact.rows() != direction_.rows() || exact.cols() != direction_.cols())
    throw std::invalid_argument("oracle built for a different stacked shape");

  OracleSample s;
  s.bias = Matrix::Zero(exact.rows(), exact.cols());
  s.noise = Matrix::Zero(exact.rows(), exact.cols());

  if (spec_.delta > 0.0) {
    switch (spec_.bias_mode) {
      case BiasMode::Zero: break;
      case BiasMode::FixedDirection: s.bias = spec_.delta * direction_; break;
      case BiasMode::GradientAligned: {
        const double gn = exact.norm();
        s.bias = gn > 0.0 ? Matrix(spec_.delta / gn * exact) : Matrix(spec_.delta * direction_);
        break;
      }
    }
  }

  if (spec_.sigma > 0.0 && spec_.noise_mode == NoiseMode::GaussianIsotropic) {
    // per-entry variance sigma^2 / (n d) gives E|nu|_F^2 = sigma^2
    const double scale = spec_.sigma / std::sqrt(static_cast<double>(exact.size()));
    for (int r = 0; r < exact.rows(); ++r)
      for (int c = 0; c < exact.cols(); ++c) s.noise(r, c) = scale * gauss_(rng_);
  }

  if (spec_.exact())
    s.gradient = exact;
  else
    s.gradient = exact + s.bias + s.noise;
  return s;
}

Matrix sample_biased_gradient(const DistributedObjective& problem, const StackedState& x, BiasedOracle& oracle)
{
  return oracle.perturb(exact_stacked_gradient(problem, x));
}

}  // namespace pldo
