#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pldo/topology.hpp"

using namespace pldo;

namespace {

std::vector<std::pair<int, int>> pairs(const EdgeSet& e)
{
  std::vector<std::pair<int, int>> out;
  for (const auto& x : e) out.emplace_back(x.i, x.j);
  return out;
}

}  // namespace

TEST_CASE("base topologies have the expected edge counts")
{
  CHECK(base_edges(5, BaseTopology::Complete).size() == 10);
  CHECK(base_edges(5, BaseTopology::Path).size() == 4);
  CHECK(base_edges(5, BaseTopology::Ring).size() == 5);
  CHECK(base_edges(5, BaseTopology::Star).size() == 4);
  CHECK(base_edges(5, BaseTopology::Empty).empty());
  for (int n : {2, 5, 10, 20, 33}) {
    CHECK(oracle::bfs_connected(n, pairs(base_edges(n, BaseTopology::Exponential))));
    CHECK(oracle::bfs_connected(n, pairs(base_edges(n, BaseTopology::RandomConnected, 7, 0.1))));
  }
}

TEST_CASE("is_connected agrees with BFS")
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 12);
    EdgeSet e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 5 == 0) e.push_back({i, j});
    CHECK(is_connected(n, e) == oracle::bfs_connected(n, pairs(e)));
  }
}

TEST_CASE("metropolis matrix matches a hand-built oracle")
{
  for (auto base : {BaseTopology::Path, BaseTopology::Ring, BaseTopology::Star, BaseTopology::Exponential}) {
    const auto seq = make_graph_sequence(7, SequenceKind::Static, {base});
    const auto w = metropolis_matrix(seq, 0).entries;
    CHECK((w - oracle::metropolis(7, pairs(seq.edges_at(0)))).cwiseAbs().maxCoeff() < 1e-15);
    const auto rep = validate_mixing({w, 0}, seq, 0);
    CHECK(rep.passed());
  }
}

TEST_CASE("validate_mixing flags broken matrices")
{
  const auto seq = make_graph_sequence(4, SequenceKind::Static, {BaseTopology::Path});
  Matrix w = metropolis_matrix(seq, 0).entries;
  w(0, 3) = 0.1;
  w(3, 0) = 0.1;
  w(0, 0) -= 0.1;
  w(3, 3) -= 0.1;
  const auto rep = validate_mixing({w, 0}, seq, 0);
  CHECK_FALSE(rep.passed());
  REQUIRE(rep.find("decentralized") != nullptr);
  CHECK_FALSE(rep.find("decentralized")->passed);
}

TEST_CASE("path of three nodes contracts by exactly one third")
{
  const auto model = MixingModel::calibrated(make_graph_sequence(3, SequenceKind::Static, {BaseTopology::Path}));
  CHECK(std::abs(model.lambda() - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("complete graph averages in one round")
{
  const auto model = MixingModel::calibrated(make_graph_sequence(6, SequenceKind::Static, {BaseTopology::Complete}));
  CHECK(model.lambda() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disconnected static graph is not contractive")
{
  const auto seq = make_graph_sequence(4, SequenceKind::Static, {BaseTopology::Empty});
  CHECK_THROWS_AS(MixingModel::calibrated(seq), NonContractiveError);
  const auto model = MixingModel::metropolis(seq);
  CHECK_FALSE(model.is_calibrated());
  CHECK_THROWS_AS((void)model.lambda(), std::logic_error);
}

TEST_CASE("tau-connected sequence: single steps disconnected, windows connected")
{
  GraphParams gp;
  gp.base = BaseTopology::Ring;
  gp.tau = 3;
  const auto seq = make_graph_sequence(9, SequenceKind::TauConnected, gp);
  CHECK(seq.tau() == 3);
  bool some_disconnected = false;
  for (std::int64_t k = 0; k < 6; ++k) {
    some_disconnected = some_disconnected || !oracle::bfs_connected(9, pairs(seq.edges_at(k)));
    EdgeSet u;
    for (std::int64_t t = k; t < k + 3; ++t)
      for (auto e : seq.edges_at(t)) u.push_back(e);
    CHECK(oracle::bfs_connected(9, pairs(u)));
  }
  CHECK(some_disconnected);
  const auto model = MixingModel::calibrated(seq);
  CHECK(model.lambda() > 0.0);
  CHECK(model.lambda() <= 1.0);
}

TEST_CASE("per-step connected sequences use connected graphs at every step")
{
  GraphParams gp;
  gp.base = BaseTopology::RandomConnected;
  gp.seed = 11;
  gp.period = 5;
  const auto seq = make_graph_sequence(8, SequenceKind::PerStepConnected, gp);
  for (std::int64_t k = 0; k < 10; ++k) CHECK(oracle::bfs_connected(8, pairs(seq.edges_at(k))));
  CHECK(seq.edges_at(0) == seq.edges_at(5));
}

TEST_CASE("graph errors")
{
  CHECK_THROWS_AS(make_graph_sequence(0, SequenceKind::Static), GraphError);
  GraphParams gp;
  gp.tau = 0;
  CHECK_THROWS_AS(make_graph_sequence(4, SequenceKind::TauConnected, gp), GraphError);
  CHECK(parse_base_topology("exponential") == BaseTopology::Exponential);
  CHECK_FALSE(parse_sequence_kind("nope").has_value());
}
