#include "pldo/linalg.hpp"

#include <algorithm>

namespace pldo {

double spectral_norm(const Matrix& m)
{
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double largest_eigenvalue(const Matrix& sym)
{
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double smallest_nonzero_eigenvalue(const Matrix& sym, double rel_tol)
{
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0.0;
  const double cut = rel_tol * top;
  double best = top;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) best = std::min(best, ev(i));
  return best;
}

Vector min_norm_solve(const Matrix& a, const Vector& b)
{
  // threshold feeds the rank decision inside compute(), so set it first
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a.rows(), a.cols());
  cod.setThreshold(1e-12);
  cod.compute(a);
  return cod.solve(b);
}

Matrix null_space_projector(const Matrix& sym, double rel_tol)
{
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Matrix proj = Matrix::Zero(sym.rows(), sym.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= rel_tol * std::max(top, 1e-300)) {
      const Vector v = es.eigenvectors().col(i);
      proj += v * v.transpose();
    }
  }
  return proj;
}

}  // namespace pldo
