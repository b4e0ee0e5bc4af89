#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pldo/linalg.hpp"

namespace pldo {

/// Undirected edge with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Sorted, duplicate-free list of undirected edges.
using EdgeSet = std::vector<Edge>;

enum class SequenceKind { Static, PerStepConnected, TauConnected };

enum class BaseTopology {
  Complete,
  Path,
  Ring,
  Star,
  Empty,
  Exponential,      // i ~ i + 2^m (mod n)
  RandomConnected,  // random spanning tree plus Bernoulli extra edges
};

std::string_view to_string(SequenceKind kind);
std::string_view to_string(BaseTopology base);
std::optional<SequenceKind> parse_sequence_kind(std::string_view name);
std::optional<BaseTopology> parse_base_topology(std::string_view name);

struct GraphParams {
  BaseTopology base = BaseTopology::Ring;
  int tau = 1;
  std::uint64_t seed = 0;
  double edge_probability = 0.3;
  /// Number of distinct graphs in a per-step-connected sequence; 0 picks n.
  int period = 0;
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time-indexed undirected edge sets on a fixed node set. Every generated
/// sequence is periodic, so it is stored as one period of edge sets.
class GraphSequence {
 public:
  GraphSequence(int n, SequenceKind kind, int tau, std::vector<EdgeSet> period);

  int node_count() const { return n_; }
  SequenceKind kind() const { return kind_; }
  int tau() const { return tau_; }
  std::size_t period() const { return period_.size(); }

  const EdgeSet& edges_at(std::int64_t k) const;
  std::vector<int> degrees_at(std::int64_t k) const;

 private:
  int n_;
  SequenceKind kind_;
  int tau_;
  std::vector<EdgeSet> period_;
};

/// Edges of a base topology. `RandomConnected` draws from `seed`.
EdgeSet base_edges(int n, BaseTopology base, std::uint64_t seed = 0, double edge_probability = 0.3);

bool is_connected(int n, const EdgeSet& edges);

/// Builds a sequence of the requested kind. Throws GraphError on n < 1, tau < 1,
/// or when the requested schedule cannot produce a connected (window) union.
GraphSequence make_graph_sequence(int n, SequenceKind kind, const GraphParams& params = {});

struct MixingMatrix {
  Matrix entries;
  std::int64_t time_index = 0;
};

/// Metropolis weights for the graph at time k.
MixingMatrix metropolis_matrix(const GraphSequence& seq, std::int64_t k);

struct Contraction {
  int tau = 1;
  double lambda = 1.0;
};

class NonContractiveError : public std::runtime_error {
 public:
  NonContractiveError(std::int64_t window_end, double sigma);
  std::int64_t window_end() const { return window_end_; }
  double sigma() const { return sigma_; }

 private:
  std::int64_t window_end_;
  double sigma_;
};

/// A gossip matrix sequence built from Metropolis weights, with its
/// contraction parameters (tau, lambda) once calibrated.
class MixingModel {
 public:
  /// Uncalibrated: lambda unknown.
  static MixingModel metropolis(GraphSequence seq);

  /// Estimates lambda over `horizon` windows (0 picks max(10 tau, period)).
  /// Throws NonContractiveError when some window does not contract.
  static MixingModel calibrated(GraphSequence seq, int horizon = 0);

  const GraphSequence& sequence() const { return seq_; }
  int node_count() const { return seq_.node_count(); }
  int tau() const { return seq_.tau(); }

  const Matrix& matrix(std::int64_t k) const;
  MixingMatrix mixing_matrix(std::int64_t k) const { return {matrix(k), k}; }

  bool is_calibrated() const { return lambda_.has_value(); }
  /// Throws std::logic_error if not calibrated.
  double lambda() const;
  Contraction contraction() const { return {tau(), lambda()}; }

 private:
  explicit MixingModel(GraphSequence seq);

  GraphSequence seq_;
  std::vector<Matrix> period_matrices_;
  std::optional<double> lambda_;
};

/// W^k W^{k-1} ... W^{k-tau+1}; requires k >= tau - 1.
Matrix window_product(const MixingModel& model, std::int64_t k, int tau);

/// 1 - max over windows k = tau-1, ..., tau-1+horizon-1 of
/// sigma_max(W^k_tau - 11^T/n). Throws NonContractiveError when a window's
/// singular value reaches 1 - 1e-12.
double estimate_lambda(const MixingModel& model, int tau, int horizon);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  const CheckResult* find(std::string_view name) const;
};

inline constexpr double kStochasticityTol = 1e-12;

/// Decentralized property, double stochasticity and nonnegativity checks.
ValidationReport validate_mixing(const MixingMatrix& m, const GraphSequence& seq, std::int64_t k);

}  // namespace pldo
