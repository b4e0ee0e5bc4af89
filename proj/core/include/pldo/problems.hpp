#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pldo/consensus.hpp"
#include "pldo/linalg.hpp"

namespace pldo {

/// Per-node gradient Lipschitz constants and the PL constant of the mean
/// objective. L_local = max_i L_i, L_global = mean_i L_i.
struct SmoothnessProfile {
  std::vector<double> L_per_node;
  double L_local = 0.0;
  double L_global = 0.0;
  double mu = 0.0;

  static SmoothnessProfile from(std::vector<double> per_node, double mu);
  int nodes() const { return static_cast<int>(L_per_node.size()); }
};

/// f(x) = (1/n) sum_i f_i(x) with f_i held by node i.
class DistributedObjective {
 public:
  virtual ~DistributedObjective() = default;

  virtual int nodes() const = 0;
  virtual int dim() const = 0;
  virtual double node_value(int i, const Vector& x) const = 0;
  virtual Vector node_gradient(int i, const Vector& x) const = 0;
  virtual const SmoothnessProfile& smoothness() const = 0;

  /// Analytic optimum when the instance knows it.
  virtual std::optional<double> optimal_value() const { return std::nullopt; }
  virtual std::optional<Vector> minimizer() const { return std::nullopt; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

/// f_i(x) = 1/2 |A_i x - y_i0|^2
struct QuadraticNode {
  Matrix A;
  Vector y0;
};

class LeastSquaresProblem final : public DistributedObjective {
 public:
  explicit LeastSquaresProblem(std::vector<QuadraticNode> nodes);

  int nodes() const override { return static_cast<int>(nodes_.size()); }
  int dim() const override { return dim_; }
  double node_value(int i, const Vector& x) const override;
  Vector node_gradient(int i, const Vector& x) const override;
  const SmoothnessProfile& smoothness() const override { return profile_; }
  std::optional<double> optimal_value() const override { return f_star_; }
  std::optional<Vector> minimizer() const override { return x_star_; }

  const QuadraticNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  /// (1/n) sum_i A_i^T A_i
  const Matrix& hessian() const { return hessian_; }
  /// Closest point of the solution set x* + null(H).
  Vector nearest_minimizer(const Vector& x) const;

 private:
  std::vector<QuadraticNode> nodes_;
  int dim_ = 0;
  Matrix hessian_;
  Matrix null_proj_;
  Vector x_star_;
  double f_star_ = 0.0;
  SmoothnessProfile profile_;
};

/// Standard-normal A_i (d_i x d) and y_i0, seeded.
LeastSquaresProblem build_least_squares(int n, int dim, int rows_per_node, std::uint64_t seed);

/// A_i = sqrt(curvature) I, so every f_i and f have L = mu = curvature.
LeastSquaresProblem build_isotropic_quadratic(int n, int dim, double curvature, std::uint64_t seed);

/// phi_i(x, y) = 1/2 |A_i x - y_i0 - B_i y|^2 - (alpha/2) |B_i y|^2
struct RobustLSNode {
  Matrix A;
  Matrix B;
  Vector y0;
};

/// Cross-Lipschitz constants of the saddle objective, per node and aggregated
/// (l = max over nodes, g = mean over nodes), with two-sided PL constants.
struct SaddleSmoothness {
  struct Node {
    double xx = 0, xy = 0, yx = 0, yy = 0;
  };
  std::vector<Node> per_node;
  Node local;
  Node global;
  double mu_x = 0.0;
  double mu_y = 0.0;
  /// Same eigenvalues without the 1/n of the mean objective.
  double mu_x_unnormalized = 0.0;
  double mu_y_unnormalized = 0.0;
  /// L_xx,g + L_xy,g / mu_y
  double L_x = 0.0;

  int nodes() const { return static_cast<int>(per_node.size()); }
};

struct SaddlePoint {
  Vector x;
  Vector y;
  double value = 0.0;
  double residual_x = 0.0;
  double residual_y = 0.0;
  /// Set when the stationarity system was singular and the minimum-norm
  /// solution was taken.
  bool min_norm_fallback = false;
};

class RobustLSProblem;

/// g_x(y) = phi(x, y) for a fixed outer point, with its analytic maximizer.
class InnerObjective {
 public:
  InnerObjective(const RobustLSProblem& problem, Vector x);

  const Vector& x() const { return x_; }
  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  /// Minimum-norm maximizer y*(x).
  const Vector& maximizer() const { return y_star_; }
  double max_value() const { return g_star_; }
  double gap(const Vector& y) const { return g_star_ - value(y); }
  /// Inner system ((alpha-1) sum B_i^T B_i) singular.
  bool degenerate() const { return degenerate_; }

  /// G(Y) = sum_i phi_i(x, y_i)
  double stacked_value(const StackedState& y) const;
  /// Rows grad_y phi_i(x, y_i).
  Matrix stacked_gradient(const StackedState& y) const;
  double stacked_max_value() const;

 private:
  const RobustLSProblem* problem_;
  Vector x_;
  Vector y_star_;
  double g_star_ = 0.0;
  bool degenerate_ = false;
};

class RobustLSProblem {
 public:
  /// Throws std::invalid_argument when alpha <= 1 or shapes disagree.
  RobustLSProblem(std::vector<RobustLSNode> nodes, double alpha);

  int nodes() const { return static_cast<int>(nodes_.size()); }
  int dim_x() const { return dim_x_; }
  int dim_y() const { return dim_y_; }
  double alpha() const { return alpha_; }
  const RobustLSNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  double node_value(int i, const Vector& x, const Vector& y) const;
  Vector node_grad_x(int i, const Vector& x, const Vector& y) const;
  Vector node_grad_y(int i, const Vector& x, const Vector& y) const;

  double value(const Vector& x, const Vector& y) const;
  Vector grad_x(const Vector& x, const Vector& y) const;
  Vector grad_y(const Vector& x, const Vector& y) const;

  const SaddleSmoothness& smoothness() const { return profile_; }
  const SaddlePoint& saddle() const { return saddle_; }

  InnerObjective inner(const Vector& x) const { return InnerObjective(*this, x); }

  /// f(x) = max_y phi(x, y)
  double envelope_value(const Vector& x) const;
  /// grad f(x) = grad_x phi(x, y*(x))
  Vector envelope_gradient(const Vector& x) const;
  /// Closest minimizer of the envelope to x.
  Vector envelope_nearest_minimizer(const Vector& x) const;

  // aggregated quadratic data, all carrying the 1/n of the mean objective
  const Matrix& hess_xx() const { return h_a_; }
  const Matrix& hess_yy_data() const { return h_b_; }
  const Matrix& cross() const { return c_; }
  const Vector& lin_x() const { return b_a_; }
  const Vector& lin_y() const { return b_b_; }

 private:
  friend class InnerObjective;

  std::vector<RobustLSNode> nodes_;
  double alpha_;
  int dim_x_ = 0;
  int dim_y_ = 0;
  Matrix h_a_, h_b_, c_;
  Vector b_a_, b_b_;
  Matrix envelope_null_proj_;
  SaddleSmoothness profile_;
  SaddlePoint saddle_;
};

/// Standard-normal A_i, B_i, y_i0, seeded. Throws on alpha <= 1.
RobustLSProblem build_robust_ls(int n, int dim_x, int dim_y, int rows_per_node, double alpha, std::uint64_t seed);

/// Solves the joint stationarity system of the saddle objective.
SaddlePoint analytic_saddle(const RobustLSProblem& problem);

}  // namespace pldo
