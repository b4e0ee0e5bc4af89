#include "pldo/consensus.hpp"

#include <stdexcept>

namespace pldo {

StackedState StackedState::replicate(const Vector& row, int nodes)
{
  return StackedState(Matrix(row.transpose().replicate(nodes, 1)));
}

Vector StackedState::mean_row() const
{
  if (data_.rows() == 0) return Vector::Zero(data_.cols());
  return data_.colwise().mean().transpose();
}

StackedState average_projection(const StackedState& x)
{
  return StackedState::replicate(x.mean_row(), x.nodes());
}

double consensus_error(const StackedState& x)
{
  return (x.matrix().rowwise() - x.mean_row().transpose()).norm();
}

void CommClock::advance(std::int64_t rounds)
{
  if (rounds < 0) throw std::invalid_argument("clock cannot move backwards");
  t0_ += rounds;
}

StackedState run_consensus(StackedState z0, std::int64_t rounds, const MixingModel& model, CommClock& clock)
{
  if (rounds < 0) throw std::invalid_argument("consensus needs a nonnegative round count");
  if (z0.nodes() != model.node_count())
    throw std::invalid_argument("state has " + std::to_string(z0.nodes()) + " rows, network has " +
                                std::to_string(model.node_count()) + " nodes");
  const std::int64_t t0 = clock.now();
  Matrix z = std::move(z0.matrix());
  Matrix next(z.rows(), z.cols());
  for (std::int64_t k = 0; k < rounds; ++k) {
    next.noalias() = model.matrix(t0 + k) * z;
    z.swap(next);
  }
  clock.advance(rounds);
  return StackedState(std::move(z));
}

}  // namespace pldo
