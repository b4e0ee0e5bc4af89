#pragma once

#include <Eigen/Dense>

namespace pldo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest singular value (spectral norm) via a dense two-sided Jacobi SVD.
double spectral_norm(const Matrix& m);

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
double largest_eigenvalue(const Matrix& sym);

/// Smallest eigenvalue above `rel_tol * largest_eigenvalue`. Returns 0 for the
/// zero matrix.
double smallest_nonzero_eigenvalue(const Matrix& sym, double rel_tol = 1e-10);

/// Minimum-norm least-squares solution of `a x = b`.
Vector min_norm_solve(const Matrix& a, const Vector& b);

/// Orthogonal projector onto the null space of a symmetric matrix.
Matrix null_space_projector(const Matrix& sym, double rel_tol = 1e-10);

}  // namespace pldo
