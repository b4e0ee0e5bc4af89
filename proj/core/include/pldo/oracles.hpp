#pragma once

#include <cstdint>
#include <random>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "pldo/consensus.hpp"
#include "pldo/problems.hpp"

namespace pldo {

enum class BiasMode { Zero, FixedDirection, GradientAligned };
enum class NoiseMode { Zero, GaussianIsotropic };

std::string_view to_string(BiasMode mode);
std::string_view to_string(NoiseMode mode);
std::optional<BiasMode> parse_bias_mode(std::string_view name);
std::optional<NoiseMode> parse_noise_mode(std::string_view name);

/// delta bounds the Frobenius norm of the bias on the stacked gradient,
/// sigma^2 bounds the expected squared Frobenius norm of the noise.
struct OracleSpec {
  double delta = 0.0;
  double sigma = 0.0;
  BiasMode bias_mode = BiasMode::FixedDirection;
  NoiseMode noise_mode = NoiseMode::GaussianIsotropic;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on negative or non-finite delta/sigma.
  void validate() const;
  bool exact() const;
};

/// Deterministic child seed for an independent stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// Row i is grad f_i(x_i).
Matrix exact_stacked_gradient(const DistributedObjective& problem, const StackedState& x);
/// Rows grad_x phi_i(x_i, y_i) and grad_y phi_i(x_i, y_i).
Matrix exact_stacked_grad_x(const RobustLSProblem& problem, const StackedState& x, const StackedState& y);
Matrix exact_stacked_grad_y(const RobustLSProblem& problem, const StackedState& x, const StackedState& y);

struct OracleSample {
  Matrix gradient;
  Matrix bias;
  Matrix noise;
};

/// Wraps exact stacked gradients with deterministic bias and Gaussian noise.
/// Owns its RNG stream; not thread-safe.
class BiasedOracle {
 public:
  BiasedOracle(const OracleSpec& spec, int nodes, int dim);

  const OracleSpec& spec() const { return spec_; }
  /// Unit-Frobenius direction used by the fixed-direction bias.
  const Matrix& bias_direction() const { return direction_; }

  OracleSample sample(const Matrix& exact);
  /// exact + bias + noise. With delta = sigma = 0 the input is returned unchanged.
  Matrix perturb(const Matrix& exact) { return sample(exact).gradient; }

 private:
  OracleSpec spec_;
  Matrix direction_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// One-shot convenience: grad F(X) + b(X) + nu with a caller-owned oracle.
Matrix sample_biased_gradient(const DistributedObjective& problem, const StackedState& x, BiasedOracle& oracle);

}  // namespace pldo
