#pragma once

#include <cstdint>

#include "pldo/linalg.hpp"
#include "pldo/topology.hpp"

namespace pldo {

/// n x d matrix whose row i is node i's local copy x_i.
class StackedState {
 public:
  StackedState() = default;
  StackedState(int nodes, int dim) : data_(Matrix::Zero(nodes, dim)) {}
  explicit StackedState(Matrix data) : data_(std::move(data)) {}

  /// Every row equal to `row` (a point of the consensus set).
  static StackedState replicate(const Vector& row, int nodes);

  int nodes() const { return static_cast<int>(data_.rows()); }
  int dim() const { return static_cast<int>(data_.cols()); }

  const Matrix& matrix() const { return data_; }
  Matrix& matrix() { return data_; }

  Vector row(int i) const { return data_.row(i).transpose(); }
  Vector mean_row() const;

  bool all_finite() const { return data_.allFinite(); }

 private:
  Matrix data_;
};

/// Projection onto the consensus set: every row replaced by the column mean.
StackedState average_projection(const StackedState& x);

/// Frobenius distance between x and its average projection.
double consensus_error(const StackedState& x);

/// Global communication cursor. One clock per run; each gossip round
/// consumes one time index of the mixing sequence.
class CommClock {
 public:
  std::int64_t now() const { return t0_; }
  void advance(std::int64_t rounds);

 private:
  std::int64_t t0_ = 0;
};

/// Multi-round gossip: Z <- W^{t0+k} Z for k = 0..rounds-1, then t0 += rounds.
StackedState run_consensus(StackedState z0, std::int64_t rounds, const MixingModel& model, CommClock& clock);

}  // namespace pldo
