#include "pldo/problems.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace pldo {

namespace {

Matrix standard_normal(int rows, int cols, std::mt19937_64& rng)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  // fill row-major so the draw order does not depend on Eigen's storage
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  return m;
}

Vector standard_normal(int size, std::mt19937_64& rng)
{
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

SmoothnessProfile SmoothnessProfile::from(std::vector<double> per_node, double mu)
{
  SmoothnessProfile p;
  p.L_per_node = std::move(per_node);
  if (!p.L_per_node.empty()) {
    p.L_local = *std::max_element(p.L_per_node.begin(), p.L_per_node.end());
    p.L_global = std::accumulate(p.L_per_node.begin(), p.L_per_node.end(), 0.0) /
                 static_cast<double>(p.L_per_node.size());
  }
  p.mu = mu;
  return p;
}

double DistributedObjective::value(const Vector& x) const
{
  double total = 0.0;
  for (int i = 0; i < nodes(); ++i) total += node_value(i, x);
  return total / nodes();
}

Vector DistributedObjective::gradient(const Vector& x) const
{
  Vector g = Vector::Zero(dim());
  for (int i = 0; i < nodes(); ++i) g += node_gradient(i, x);
  return g / nodes();
}

LeastSquaresProblem::LeastSquaresProblem(std::vector<QuadraticNode> nodes) : nodes_(std::move(nodes))
{
  if (nodes_.empty()) throw std::invalid_argument("least squares problem needs at least one node");
  dim_ = static_cast<int>(nodes_.front().A.cols());
  const double n = static_cast<double>(nodes_.size());

  hessian_ = Matrix::Zero(dim_, dim_);
  Vector rhs = Vector::Zero(dim_);
  std::vector<double> lips;
  for (const auto& node : nodes_) {
    if (node.A.cols() != dim_ || node.A.rows() != node.y0.size())
      throw std::invalid_argument("least squares node shapes disagree");
    const Matrix ata = node.A.transpose() * node.A;
    hessian_ += ata;
    rhs += node.A.transpose() * node.y0;
    lips.push_back(largest_eigenvalue(ata));
  }
  hessian_ /= n;
  rhs /= n;

  x_star_ = min_norm_solve(hessian_, rhs);
  null_proj_ = null_space_projector(hessian_);
  f_star_ = value(x_star_);
  profile_ = SmoothnessProfile::from(std::move(lips), smallest_nonzero_eigenvalue(hessian_));
}

double LeastSquaresProblem::node_value(int i, const Vector& x) const
{
  const auto& nd = node(i);
  return 0.5 * (nd.A * x - nd.y0).squaredNorm();
}

Vector LeastSquaresProblem::node_gradient(int i, const Vector& x) const
{
  const auto& nd = node(i);
  return nd.A.transpose() * (nd.A * x - nd.y0);
}

Vector LeastSquaresProblem::nearest_minimizer(const Vector& x) const
{
  return x_star_ + null_proj_ * (x - x_star_);
}

LeastSquaresProblem build_least_squares(int n, int dim, int rows_per_node, std::uint64_t seed)
{
  if (n < 1 || dim < 1 || rows_per_node < 1)
    throw std::invalid_argument("least squares dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::vector<QuadraticNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    QuadraticNode nd;
    nd.A = standard_normal(rows_per_node, dim, rng);
    nd.y0 = standard_normal(rows_per_node, rng);
    nodes.push_back(std::move(nd));
  }
  return LeastSquaresProblem(std::move(nodes));
}

LeastSquaresProblem build_isotropic_quadratic(int n, int dim, double curvature, std::uint64_t seed)
{
  if (n < 1 || dim < 1) throw std::invalid_argument("quadratic dimensions must be positive");
  if (!(curvature > 0.0)) throw std::invalid_argument("curvature must be positive");
  std::mt19937_64 rng(seed);
  std::vector<QuadraticNode> nodes;
  for (int i = 0; i < n; ++i)
    nodes.push_back({std::sqrt(curvature) * Matrix::Identity(dim, dim), standard_normal(dim, rng)});
  return LeastSquaresProblem(std::move(nodes));
}

RobustLSProblem::RobustLSProblem(std::vector<RobustLSNode> nodes, double alpha)
    : nodes_(std::move(nodes)), alpha_(alpha)
{
  if (!(alpha_ > 1.0))
    throw std::invalid_argument("robust least squares needs alpha > 1 (got " + std::to_string(alpha_) + ")");
  if (nodes_.empty()) throw std::invalid_argument("robust least squares needs at least one node");
  dim_x_ = static_cast<int>(nodes_.front().A.cols());
  dim_y_ = static_cast<int>(nodes_.front().B.cols());
  const double n = static_cast<double>(nodes_.size());

  h_a_ = Matrix::Zero(dim_x_, dim_x_);
  h_b_ = Matrix::Zero(dim_y_, dim_y_);
  c_ = Matrix::Zero(dim_x_, dim_y_);
  b_a_ = Vector::Zero(dim_x_);
  b_b_ = Vector::Zero(dim_y_);
  for (const auto& nd : nodes_) {
    if (nd.A.cols() != dim_x_ || nd.B.cols() != dim_y_ || nd.A.rows() != nd.B.rows() ||
        nd.A.rows() != nd.y0.size())
      throw std::invalid_argument("robust least squares node shapes disagree");
    const Matrix ata = nd.A.transpose() * nd.A;
    const Matrix btb = nd.B.transpose() * nd.B;
    const Matrix atb = nd.A.transpose() * nd.B;
    h_a_ += ata;
    h_b_ += btb;
    c_ += atb;
    b_a_ += nd.A.transpose() * nd.y0;
    b_b_ += nd.B.transpose() * nd.y0;

    SaddleSmoothness::Node l;
    l.xx = largest_eigenvalue(ata);
    l.xy = spectral_norm(atb);
    l.yx = l.xy;
    l.yy = (alpha_ - 1.0) * largest_eigenvalue(btb);
    profile_.per_node.push_back(l);
  }
  h_a_ /= n;
  h_b_ /= n;
  c_ /= n;
  b_a_ /= n;
  b_b_ /= n;

  auto& lo = profile_.local;
  auto& gl = profile_.global;
  for (const auto& l : profile_.per_node) {
    lo.xx = std::max(lo.xx, l.xx);
    lo.xy = std::max(lo.xy, l.xy);
    lo.yx = std::max(lo.yx, l.yx);
    lo.yy = std::max(lo.yy, l.yy);
    gl.xx += l.xx / n;
    gl.xy += l.xy / n;
    gl.yx += l.yx / n;
    gl.yy += l.yy / n;
  }
  profile_.mu_x = smallest_nonzero_eigenvalue(h_a_);
  profile_.mu_y = smallest_nonzero_eigenvalue((alpha_ - 1.0) * h_b_);
  profile_.mu_x_unnormalized = n * profile_.mu_x;
  profile_.mu_y_unnormalized = n * profile_.mu_y;
  profile_.L_x = gl.xy > 0.0 && profile_.mu_y > 0.0 ? gl.xx + gl.xy / profile_.mu_y : gl.xx;

  // Hessian of the envelope max_y phi: H_A + C M^+ C^T with M = (alpha-1) H_B
  const Matrix m = (alpha_ - 1.0) * h_b_;
  const Matrix m_pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(m).pseudoInverse();
  envelope_null_proj_ = null_space_projector(h_a_ + c_ * m_pinv * c_.transpose());

  saddle_ = analytic_saddle(*this);
}

double RobustLSProblem::node_value(int i, const Vector& x, const Vector& y) const
{
  const auto& nd = node(i);
  const Vector by = nd.B * y;
  return 0.5 * (nd.A * x - nd.y0 - by).squaredNorm() - 0.5 * alpha_ * by.squaredNorm();
}

Vector RobustLSProblem::node_grad_x(int i, const Vector& x, const Vector& y) const
{
  const auto& nd = node(i);
  return nd.A.transpose() * (nd.A * x - nd.y0 - nd.B * y);
}

Vector RobustLSProblem::node_grad_y(int i, const Vector& x, const Vector& y) const
{
  const auto& nd = node(i);
  const Vector by = nd.B * y;
  return -nd.B.transpose() * (nd.A * x - nd.y0 - by) - alpha_ * (nd.B.transpose() * by);
}

double RobustLSProblem::value(const Vector& x, const Vector& y) const
{
  double total = 0.0;
  for (int i = 0; i < nodes(); ++i) total += node_value(i, x, y);
  return total / nodes();
}

Vector RobustLSProblem::grad_x(const Vector& x, const Vector& y) const
{
  return h_a_ * x - c_ * y - b_a_;
}

Vector RobustLSProblem::grad_y(const Vector& x, const Vector& y) const
{
  return -c_.transpose() * x + b_b_ - (alpha_ - 1.0) * (h_b_ * y);
}

double RobustLSProblem::envelope_value(const Vector& x) const
{
  return inner(x).max_value();
}

Vector RobustLSProblem::envelope_gradient(const Vector& x) const
{
  return grad_x(x, inner(x).maximizer());
}

Vector RobustLSProblem::envelope_nearest_minimizer(const Vector& x) const
{
  return saddle_.x + envelope_null_proj_ * (x - saddle_.x);
}

RobustLSProblem build_robust_ls(int n, int dim_x, int dim_y, int rows_per_node, double alpha, std::uint64_t seed)
{
  if (n < 1 || dim_x < 1 || dim_y < 1 || rows_per_node < 1)
    throw std::invalid_argument("robust least squares dimensions must be positive");
  if (!(alpha > 1.0))
    throw std::invalid_argument("robust least squares needs alpha > 1 (got " + std::to_string(alpha) + ")");
  std::mt19937_64 rng(seed);
  std::vector<RobustLSNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RobustLSNode nd;
    nd.A = standard_normal(rows_per_node, dim_x, rng);
    nd.B = standard_normal(rows_per_node, dim_y, rng);
    nd.y0 = standard_normal(rows_per_node, rng);
    nodes.push_back(std::move(nd));
  }
  return RobustLSProblem(std::move(nodes), alpha);
}

SaddlePoint analytic_saddle(const RobustLSProblem& p)
{
  const int dx = p.dim_x(), dy = p.dim_y();
  // [ H_A        -C          ] [x]   [ b_a ]
  // [ -C^T  -(alpha-1) H_B   ] [y] = [ -b_b]
  Matrix k(dx + dy, dx + dy);
  k.topLeftCorner(dx, dx) = p.hess_xx();
  k.topRightCorner(dx, dy) = -p.cross();
  k.bottomLeftCorner(dy, dx) = -p.cross().transpose();
  k.bottomRightCorner(dy, dy) = -(p.alpha() - 1.0) * p.hess_yy_data();
  Vector rhs(dx + dy);
  rhs << p.lin_x(), -p.lin_y();

  Eigen::JacobiSVD<Matrix> svd(k);
  const auto& sv = svd.singularValues();
  const bool singular = sv.size() > 0 && sv(sv.size() - 1) <= 1e-12 * sv(0);

  const Vector z = min_norm_solve(k, rhs);
  SaddlePoint s;
  s.x = z.head(dx);
  s.y = z.tail(dy);
  s.value = p.value(s.x, s.y);
  s.residual_x = p.grad_x(s.x, s.y).norm();
  s.residual_y = p.grad_y(s.x, s.y).norm();
  s.min_norm_fallback = singular;
  return s;
}

InnerObjective::InnerObjective(const RobustLSProblem& problem, Vector x) : problem_(&problem), x_(std::move(x))
{
  const Matrix m = (problem.alpha() - 1.0) * problem.hess_yy_data();
  const Vector rhs = problem.lin_y() - problem.cross().transpose() * x_;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  degenerate_ = sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * std::max(sv(0), 1e-300);
  y_star_ = min_norm_solve(m, rhs);
  g_star_ = problem.value(x_, y_star_);
}

double InnerObjective::value(const Vector& y) const
{
  return problem_->value(x_, y);
}

Vector InnerObjective::gradient(const Vector& y) const
{
  return problem_->grad_y(x_, y);
}

double InnerObjective::stacked_value(const StackedState& y) const
{
  double total = 0.0;
  for (int i = 0; i < problem_->nodes(); ++i) total += problem_->node_value(i, x_, y.row(i));
  return total;
}

Matrix InnerObjective::stacked_gradient(const StackedState& y) const
{
  Matrix g(problem_->nodes(), problem_->dim_y());
  for (int i = 0; i < problem_->nodes(); ++i) g.row(i) = problem_->node_grad_y(i, x_, y.row(i)).transpose();
  return g;
}

double InnerObjective::stacked_max_value() const
{
  return problem_->nodes() * g_star_;
}

}  // namespace pldo
