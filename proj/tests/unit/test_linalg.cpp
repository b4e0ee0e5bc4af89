#include <doctest.h>

#include "oracles.hpp"
#include "pldo/linalg.hpp"

using namespace pldo;

TEST_CASE("spectral norm matches power iteration")
{
  Matrix a(3, 2);
  a << 1, 2, 3, 4, 5, 6;
  CHECK(spectral_norm(a) == doctest::Approx(oracle::power_sigma_max(a)).epsilon(1e-10));
}

TEST_CASE("smallest nonzero eigenvalue skips the null space")
{
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 2.0;
  h(1, 1) = 0.5;
  CHECK(smallest_nonzero_eigenvalue(h) == doctest::Approx(0.5));
  CHECK(largest_eigenvalue(h) == doctest::Approx(2.0));
  CHECK(smallest_nonzero_eigenvalue(Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("min-norm solve and null projector")
{
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 4.0;
  Vector b(2);
  b << 8.0, 0.0;
  const Vector x = min_norm_solve(h, b);
  CHECK(x(0) == doctest::Approx(2.0));
  CHECK(x(1) == doctest::Approx(0.0).epsilon(1e-14));
  const Matrix p = null_space_projector(h);
  CHECK(p(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(p(0, 0)) < 1e-14);
}
