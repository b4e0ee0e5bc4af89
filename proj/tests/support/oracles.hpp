#pragma once

// Reference computations for tests. Deliberately independent of the library:
// no calls into pldo numerics, only plain loops and Eigen containers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline bool bfs_connected(int n, const std::vector<std::pair<int, int>>& edges)
{
  if (n <= 1) return true;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++count;
        q.push(v);
      }
  }
  return count == n;
}

/// Metropolis weights written out entry by entry.
inline Mat metropolis(int n, const std::vector<std::pair<int, int>>& edges)
{
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : edges) {
    ++deg[static_cast<std::size_t>(a)];
    ++deg[static_cast<std::size_t>(b)];
  }
  Mat w = Mat::Zero(n, n);
  for (auto [a, b] : edges) {
    const double v = 1.0 / (1.0 + std::max(deg[static_cast<std::size_t>(a)], deg[static_cast<std::size_t>(b)]));
    w(a, b) = v;
    w(b, a) = v;
  }
  for (int i = 0; i < n; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

/// Central differences with step 1e-6 (1 + |x|).
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x)
{
  const double h = 1e-6 * (1.0 + x.norm());
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double rel_error(const Vec& a, const Vec& b)
{
  return (a - b).norm() / std::max(1.0, b.norm());
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(Mat a, int sweeps = 100)
{
  const int n = static_cast<int>(a.rows());
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * (1.0 + a.squaredNorm())) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double smallest_nonzero(const std::vector<double>& ev, double rel_tol = 1e-9)
{
  const double top = ev.empty() ? 0.0 : std::max(std::abs(ev.front()), std::abs(ev.back()));
  for (double v : ev)
    if (v > rel_tol * top) return v;
  return 0.0;
}

/// Plain gradient descent for a long horizon.
inline Vec long_run_gd(const std::function<Vec(const Vec&)>& grad, Vec x, double step, int iters)
{
  for (int k = 0; k < iters; ++k) x -= step * grad(x);
  return x;
}

/// Largest singular value by power iteration on a^T a.
inline double power_sigma_max(const Mat& a, int iters = 2000)
{
  Vec v = Vec::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  double s = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vec w = a.transpose() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    s = std::sqrt(nw);
  }
  return s;
}

}  // namespace oracle
