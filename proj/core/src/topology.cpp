#include "pldo/topology.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace pldo {

namespace {

Edge make_edge(int a, int b)
{
  return a < b ? Edge{a, b} : Edge{b, a};
}

void normalize(EdgeSet& edges)
{
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void check_edges(int n, const EdgeSet& edges)
{
  for (const auto& e : edges)
    if (e.i < 0 || e.j >= n || e.i >= e.j)
      throw GraphError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                       ") invalid for n=" + std::to_string(n));
}

// Base edges in generation order, before sorting. Tau-connected batching
// uses this order so a ring splits into rotating runs of consecutive edges.
EdgeSet base_edges_ordered(int n, BaseTopology base, std::uint64_t seed, double p)
{
  EdgeSet edges;
  switch (base) {
    case BaseTopology::Complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
      break;
    case BaseTopology::Path:
      for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
      break;
    case BaseTopology::Ring:
      if (n == 2) edges.push_back({0, 1});
      if (n >= 3)
        for (int i = 0; i < n; ++i) edges.push_back(make_edge(i, (i + 1) % n));
      break;
    case BaseTopology::Star:
      for (int i = 1; i < n; ++i) edges.push_back({0, i});
      break;
    case BaseTopology::Empty:
      break;
    case BaseTopology::Exponential:
      for (int s = 1; s < n; s *= 2)
        for (int i = 0; i < n; ++i) {
          const int j = (i + s) % n;
          if (i != j) edges.push_back(make_edge(i, j));
        }
      break;
    case BaseTopology::RandomConnected: {
      std::mt19937_64 rng(seed);
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (int k = 1; k < n; ++k) {
        std::uniform_int_distribution<int> pick(0, k - 1);
        edges.push_back(make_edge(order[static_cast<std::size_t>(k)],
                                  order[static_cast<std::size_t>(pick(rng))]));
      }
      std::bernoulli_distribution coin(std::clamp(p, 0.0, 1.0));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (coin(rng)) edges.push_back({i, j});
      break;
    }
  }
  // drop duplicates but keep first-occurrence order
  EdgeSet unique;
  for (const auto& e : edges)
    if (std::find(unique.begin(), unique.end(), e) == unique.end()) unique.push_back(e);
  return unique;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::string_view to_string(SequenceKind kind)
{
  switch (kind) {
    case SequenceKind::Static: return "static";
    case SequenceKind::PerStepConnected: return "per_step_connected";
    case SequenceKind::TauConnected: return "tau_connected";
  }
  return "?";
}

std::string_view to_string(BaseTopology base)
{
  switch (base) {
    case BaseTopology::Complete: return "complete";
    case BaseTopology::Path: return "path";
    case BaseTopology::Ring: return "ring";
    case BaseTopology::Star: return "star";
    case BaseTopology::Empty: return "empty";
    case BaseTopology::Exponential: return "exponential";
    case BaseTopology::RandomConnected: return "random";
  }
  return "?";
}

std::optional<SequenceKind> parse_sequence_kind(std::string_view name)
{
  for (auto k : {SequenceKind::Static, SequenceKind::PerStepConnected, SequenceKind::TauConnected})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::optional<BaseTopology> parse_base_topology(std::string_view name)
{
  for (auto b : {BaseTopology::Complete, BaseTopology::Path, BaseTopology::Ring, BaseTopology::Star,
                 BaseTopology::Empty, BaseTopology::Exponential, BaseTopology::RandomConnected})
    if (to_string(b) == name) return b;
  return std::nullopt;
}

GraphSequence::GraphSequence(int n, SequenceKind kind, int tau, std::vector<EdgeSet> period)
    : n_(n), kind_(kind), tau_(tau), period_(std::move(period))
{
  if (n_ < 1) throw GraphError("graph sequence needs n >= 1");
  if (tau_ < 1) throw GraphError("graph sequence needs tau >= 1");
  if (period_.empty()) throw GraphError("graph sequence needs at least one edge set");
  for (auto& edges : period_) {
    normalize(edges);
    check_edges(n_, edges);
  }
}

const EdgeSet& GraphSequence::edges_at(std::int64_t k) const
{
  if (k < 0) throw std::out_of_range("time index must be nonnegative");
  return period_[static_cast<std::size_t>(k % static_cast<std::int64_t>(period_.size()))];
}

std::vector<int> GraphSequence::degrees_at(std::int64_t k) const
{
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_at(k)) {
    ++deg[static_cast<std::size_t>(e.i)];
    ++deg[static_cast<std::size_t>(e.j)];
  }
  return deg;
}

EdgeSet base_edges(int n, BaseTopology base, std::uint64_t seed, double edge_probability)
{
  if (n < 1) throw GraphError("graph needs n >= 1");
  EdgeSet edges = base_edges_ordered(n, base, seed, edge_probability);
  normalize(edges);
  return edges;
}

bool is_connected(int n, const EdgeSet& edges)
{
  if (n <= 1) return true;
  // union-find
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      auto& p = parent[static_cast<std::size_t>(v)];
      p = parent[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  };
  int components = n;
  for (const auto& e : edges) {
    const int a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }
  return components == 1;
}

GraphSequence make_graph_sequence(int n, SequenceKind kind, const GraphParams& params)
{
  if (n < 1) throw GraphError("graph sequence needs n >= 1");
  switch (kind) {
    case SequenceKind::Static:
      return GraphSequence(n, kind, 1,
                           {base_edges(n, params.base, params.seed, params.edge_probability)});

    case SequenceKind::PerStepConnected: {
      const int period = params.period > 0 ? params.period : n;
      std::vector<EdgeSet> graphs;
      graphs.reserve(static_cast<std::size_t>(period));
      if (params.base == BaseTopology::RandomConnected) {
        for (int k = 0; k < period; ++k)
          graphs.push_back(base_edges(n, params.base, mix_seed(params.seed, static_cast<std::uint64_t>(k)),
                                      params.edge_probability));
      } else {
        // relabel the base graph by a cyclic shift that advances each step
        const EdgeSet base = base_edges(n, params.base, params.seed, params.edge_probability);
        for (int k = 0; k < period; ++k) {
          EdgeSet shifted;
          for (const auto& e : base) shifted.push_back(make_edge((e.i + k) % n, (e.j + k) % n));
          graphs.push_back(std::move(shifted));
        }
      }
      for (const auto& g : graphs)
        if (!is_connected(n, g))
          throw GraphError("per-step-connected sequence requested from a disconnected base '" +
                           std::string(to_string(params.base)) + "'");
      return GraphSequence(n, kind, 1, std::move(graphs));
    }

    case SequenceKind::TauConnected: {
      if (params.tau < 1) throw GraphError("tau-connected sequence needs tau >= 1");
      const EdgeSet ordered = base_edges_ordered(n, params.base, params.seed, params.edge_probability);
      if (!is_connected(n, ordered))
        throw GraphError("tau-connected schedule cannot cover a connected union: base '" +
                         std::string(to_string(params.base)) + "' is disconnected");
      std::vector<EdgeSet> batches(static_cast<std::size_t>(params.tau));
      for (std::size_t e = 0; e < ordered.size(); ++e)
        batches[e % batches.size()].push_back(ordered[e]);
      return GraphSequence(n, kind, params.tau, std::move(batches));
    }
  }
  throw GraphError("unknown sequence kind");
}

MixingMatrix metropolis_matrix(const GraphSequence& seq, std::int64_t k)
{
  const int n = seq.node_count();
  const auto deg = seq.degrees_at(k);
  Matrix w = Matrix::Zero(n, n);
  for (const auto& e : seq.edges_at(k)) {
    const double v = 1.0 / (1.0 + std::max(deg[static_cast<std::size_t>(e.i)], deg[static_cast<std::size_t>(e.j)]));
    w(e.i, e.j) = v;
    w(e.j, e.i) = v;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return {std::move(w), k};
}

NonContractiveError::NonContractiveError(std::int64_t window_end, double sigma)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "mixing sequence does not contract: window ending at k=" << window_end
           << " has sigma_max(W_tau - J) = " << sigma;
        return os.str();
      }()),
      window_end_(window_end),
      sigma_(sigma)
{
}

MixingModel::MixingModel(GraphSequence seq) : seq_(std::move(seq))
{
  period_matrices_.reserve(seq_.period());
  for (std::size_t k = 0; k < seq_.period(); ++k)
    period_matrices_.push_back(metropolis_matrix(seq_, static_cast<std::int64_t>(k)).entries);
}

MixingModel MixingModel::metropolis(GraphSequence seq)
{
  return MixingModel(std::move(seq));
}

MixingModel MixingModel::calibrated(GraphSequence seq, int horizon)
{
  MixingModel model(std::move(seq));
  if (horizon <= 0)
    horizon = std::max(10 * model.tau(), static_cast<int>(model.seq_.period()));
  model.lambda_ = estimate_lambda(model, model.tau(), horizon);
  return model;
}

const Matrix& MixingModel::matrix(std::int64_t k) const
{
  if (k < 0) throw std::out_of_range("time index must be nonnegative");
  return period_matrices_[static_cast<std::size_t>(k % static_cast<std::int64_t>(period_matrices_.size()))];
}

double MixingModel::lambda() const
{
  if (!lambda_) throw std::logic_error("mixing model has no contraction estimate");
  return *lambda_;
}

Matrix window_product(const MixingModel& model, std::int64_t k, int tau)
{
  if (tau < 1 || k < tau - 1) throw std::out_of_range("window needs tau >= 1 and k >= tau - 1");
  const int n = model.node_count();
  Matrix prod = Matrix::Identity(n, n);
  for (std::int64_t t = k - tau + 1; t <= k; ++t) prod = model.matrix(t) * prod;
  return prod;
}

double estimate_lambda(const MixingModel& model, int tau, int horizon)
{
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (tau < 1) throw std::invalid_argument("tau must be >= 1");
  const int n = model.node_count();
  const Matrix avg = Matrix::Constant(n, n, 1.0 / n);
  double worst = 0.0;
  for (std::int64_t k = tau - 1; k < tau - 1 + horizon; ++k) {
    const double s = spectral_norm(window_product(model, k, tau) - avg);
    if (s >= 1.0 - 1e-12) throw NonContractiveError(k, s);
    worst = std::max(worst, s);
  }
  return 1.0 - worst;
}

bool ValidationReport::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(std::string_view name) const
{
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_mixing(const MixingMatrix& m, const GraphSequence& seq, std::int64_t k)
{
  const int n = seq.node_count();
  const Matrix& w = m.entries;
  ValidationReport report;
  if (w.rows() != n || w.cols() != n) {
    report.checks.push_back({"dimensions", false,
                             "matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                                 ", graph has n=" + std::to_string(n)});
    return report;
  }

  const EdgeSet& edges = seq.edges_at(k);
  CheckResult decentral{"decentralized", true, ""};
  for (int i = 0; i < n && decentral.passed; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      if (!std::binary_search(edges.begin(), edges.end(), make_edge(i, j))) {
        decentral.passed = false;
        decentral.detail = "nonzero entry at non-edge (" + std::to_string(i) + "," + std::to_string(j) + ")";
        break;
      }
    }
  report.checks.push_back(decentral);

  CheckResult stoch{"double_stochastic", true, ""};
  const Vector rows = w.rowwise().sum();
  const Vector cols = w.colwise().sum().transpose();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    worst = std::max({worst, std::abs(rows(i) - 1.0), std::abs(cols(i) - 1.0)});
  if (worst > kStochasticityTol) {
    std::ostringstream os;
    os.precision(17);
    os << "max |row/col sum - 1| = " << worst;
    stoch.passed = false;
    stoch.detail = os.str();
  }
  report.checks.push_back(stoch);

  CheckResult nonneg{"nonnegative", w.minCoeff() >= 0.0, ""};
  if (!nonneg.passed) nonneg.detail = "min entry " + std::to_string(w.minCoeff());
  report.checks.push_back(nonneg);
  return report;
}

}  // namespace pldo
