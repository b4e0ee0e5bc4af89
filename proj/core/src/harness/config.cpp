#include "pldo/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "json_io.hpp"

namespace pldo::harness {

ConfigError::ConfigError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + message : file + ": " + message),
      line_(line)
{
}

std::string_view to_string(ProblemKind kind)
{
  switch (kind) {
    case ProblemKind::LeastSquares: return "least_squares";
    case ProblemKind::Quadratic: return "quadratic";
    case ProblemKind::RobustLS: return "robust_ls";
  }
  return "?";
}

std::string_view to_string(AlgorithmKind kind)
{
  switch (kind) {
    case AlgorithmKind::DGD: return "dgd";
    case AlgorithmKind::MGDA: return "mgda";
    case AlgorithmKind::Centralized: return "centralized";
  }
  return "?";
}

std::string_view to_string(InitKind kind)
{
  return kind == InitKind::Zero ? "zero" : "random";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const
  {
    const auto mark = at.Mark();
    throw ConfigError(file_, mark.line >= 0 ? mark.line + 1 : 0, msg);
  }

  void expect_map(const YAML::Node& node, const std::string& what) const
  {
    if (!node.IsMap()) fail(node, "'" + what + "' must be a mapping");
  }

  // Walks a mapping, rejecting keys without a handler.
  void each(const YAML::Node& map, const std::string& section,
            const std::map<std::string, std::function<void(const YAML::Node&)>>& handlers) const
  {
    expect_map(map, section);
    for (auto it = map.begin(); it != map.end(); ++it) {
      const auto key = it->first.as<std::string>();
      auto h = handlers.find(key);
      if (h == handlers.end()) {
        std::string known;
        for (const auto& [k, _] : handlers) known += (known.empty() ? "" : ", ") + k;
        fail(it->first, "unknown key '" + key + "' in " + section + " (expected one of: " + known + ")");
      }
      h->second(it->second);
    }
  }

  double real(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsScalar()) fail(n, "'" + key + "' expects a number");
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + key + "' expects a number, got '" + n.Scalar() + "'");
    }
  }

  std::int64_t integer(const YAML::Node& n, const std::string& key) const
  {
    const double v = real(n, key);
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15)
      fail(n, "'" + key + "' expects an integer, got '" + n.Scalar() + "'");
    return static_cast<std::int64_t>(v);
  }

  std::uint64_t seed(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsScalar()) fail(n, "'" + key + "' expects a nonnegative integer");
    try {
      return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      const auto v = integer(n, key);
      if (v < 0) fail(n, "'" + key + "' expects a nonnegative integer");
      return static_cast<std::uint64_t>(v);
    }
  }

  bool boolean(const YAML::Node& n, const std::string& key) const
  {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, "'" + key + "' expects true or false, got '" + (n.IsScalar() ? n.Scalar() : "?") + "'");
    }
  }

  std::string text(const YAML::Node& n, const std::string& key) const
  {
    if (!n.IsScalar()) fail(n, "'" + key + "' expects a string");
    return n.Scalar();
  }

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

int to_int(const Reader& r, const YAML::Node& n, const std::string& key)
{
  const auto v = r.integer(n, key);
  if (v < -2147483647 || v > 2147483647) r.fail(n, "'" + key + "' out of range");
  return static_cast<int>(v);
}

void positive(const Reader& r, const YAML::Node& n, const std::string& key, double v)
{
  if (!(v > 0.0)) r.fail(n, "'" + key + "' must be positive");
}

void nonneg(const Reader& r, const YAML::Node& n, const std::string& key, double v)
{
  if (!(v >= 0.0)) r.fail(n, "'" + key + "' must be >= 0");
}

void read_problem(const Reader& r, const YAML::Node& node, ProblemSpec& p)
{
  r.each(node, "problem",
         {{"kind",
           [&](const YAML::Node& v) {
             const auto s = r.text(v, "kind");
             if (s == "least_squares") p.kind = ProblemKind::LeastSquares;
             else if (s == "quadratic") p.kind = ProblemKind::Quadratic;
             else if (s == "robust_ls") p.kind = ProblemKind::RobustLS;
             else r.fail(v, "unknown problem kind '" + s + "' (least_squares, quadratic, robust_ls)");
           }},
          {"n", [&](const YAML::Node& v) { p.n = to_int(r, v, "n"); positive(r, v, "n", p.n); }},
          {"d", [&](const YAML::Node& v) { p.d = to_int(r, v, "d"); positive(r, v, "d", p.d); }},
          {"d_x", [&](const YAML::Node& v) { p.d = to_int(r, v, "d_x"); positive(r, v, "d_x", p.d); }},
          {"d_y", [&](const YAML::Node& v) { p.d_y = to_int(r, v, "d_y"); positive(r, v, "d_y", p.d_y); }},
          {"d_i", [&](const YAML::Node& v) { p.d_i = to_int(r, v, "d_i"); nonneg(r, v, "d_i", p.d_i); }},
          {"alpha", [&](const YAML::Node& v) { p.alpha = r.real(v, "alpha"); }},
          {"curvature",
           [&](const YAML::Node& v) { p.curvature = r.real(v, "curvature"); positive(r, v, "curvature", p.curvature); }},
          {"seed", [&](const YAML::Node& v) { p.seed = r.seed(v, "seed"); }},
          {"vary_with_seed", [&](const YAML::Node& v) { p.vary_with_seed = r.boolean(v, "vary_with_seed"); }}});
}

void read_graph(const Reader& r, const YAML::Node& node, GraphSpec& g)
{
  r.each(node, "graph",
         {{"kind",
           [&](const YAML::Node& v) {
             const auto s = r.text(v, "kind");
             auto k = parse_sequence_kind(s);
             if (!k) r.fail(v, "unknown graph kind '" + s + "' (static, per_step_connected, tau_connected)");
             g.kind = *k;
           }},
          {"base",
           [&](const YAML::Node& v) {
             const auto s = r.text(v, "base");
             auto b = parse_base_topology(s);
             if (!b) r.fail(v, "unknown base topology '" + s + "' (complete, path, ring, star, empty, exponential, random)");
             g.params.base = *b;
           }},
          {"tau", [&](const YAML::Node& v) { g.params.tau = to_int(r, v, "tau"); positive(r, v, "tau", g.params.tau); }},
          {"seed", [&](const YAML::Node& v) { g.params.seed = r.seed(v, "seed"); }},
          {"edge_probability",
           [&](const YAML::Node& v) {
             g.params.edge_probability = r.real(v, "edge_probability");
             if (!(g.params.edge_probability >= 0.0 && g.params.edge_probability <= 1.0))
               r.fail(v, "'edge_probability' must lie in [0, 1]");
           }},
          {"period", [&](const YAML::Node& v) { g.params.period = to_int(r, v, "period"); nonneg(r, v, "period", g.params.period); }},
          {"horizon", [&](const YAML::Node& v) { g.horizon = to_int(r, v, "horizon"); nonneg(r, v, "horizon", g.horizon); }},
          {"vary_with_seed", [&](const YAML::Node& v) { g.vary_with_seed = r.boolean(v, "vary_with_seed"); }}});
}

void read_algorithm(const Reader& r, const YAML::Node& node, AlgorithmSpec& a)
{
  auto count = [&](const YAML::Node& v, const std::string& key, std::int64_t& out) {
    out = r.integer(v, key);
    nonneg(r, v, key, static_cast<double>(out));
  };
  auto step = [&](const YAML::Node& v, const std::string& key, double& out) {
    out = r.real(v, key);
    positive(r, v, key, out);
  };
  r.each(node, "algorithm",
         {{"kind",
           [&](const YAML::Node& v) {
             const auto s = r.text(v, "kind");
             if (s == "dgd") a.kind = AlgorithmKind::DGD;
             else if (s == "mgda") a.kind = AlgorithmKind::MGDA;
             else if (s == "centralized") a.kind = AlgorithmKind::Centralized;
             else r.fail(v, "unknown algorithm kind '" + s + "' (dgd, mgda, centralized)");
           }},
          {"gamma", [&](const YAML::Node& v) { step(v, "gamma", a.gamma); }},
          {"N", [&](const YAML::Node& v) { count(v, "N", a.N); }},
          {"T",
           [&](const YAML::Node& v) {
             if (v.IsSequence()) {
               a.T_list.clear();
               for (const auto& e : v) {
                 std::int64_t t = 0;
                 count(e, "T", t);
                 a.T_list.push_back(t);
               }
               if (a.T_list.empty()) r.fail(v, "'T' list is empty");
             } else {
               count(v, "T", a.T);
             }
           }},
          {"gamma_x", [&](const YAML::Node& v) { step(v, "gamma_x", a.gamma_x); }},
          {"gamma_y", [&](const YAML::Node& v) { step(v, "gamma_y", a.gamma_y); }},
          {"N_x", [&](const YAML::Node& v) { count(v, "N_x", a.N_x); }},
          {"N_y", [&](const YAML::Node& v) { count(v, "N_y", a.N_y); }},
          {"T_x", [&](const YAML::Node& v) { count(v, "T_x", a.T_x); }},
          {"T_y", [&](const YAML::Node& v) { count(v, "T_y", a.T_y); }},
          {"record_every",
           [&](const YAML::Node& v) {
             a.record_every = r.integer(v, "record_every");
             positive(r, v, "record_every", static_cast<double>(a.record_every));
           }},
          {"auto_project", [&](const YAML::Node& v) { a.auto_project = r.boolean(v, "auto_project"); }},
          {"init", [&](const YAML::Node& v) {
             const auto s = r.text(v, "init");
             if (s == "zero") a.init = InitKind::Zero;
             else if (s == "random") a.init = InitKind::Random;
             else r.fail(v, "unknown init '" + s + "' (zero, random)");
           }}});
}

void read_oracle(const Reader& r, const YAML::Node& node, OracleSpec& o)
{
  r.each(node, "oracle",
         {{"delta", [&](const YAML::Node& v) { o.delta = r.real(v, "delta"); nonneg(r, v, "delta", o.delta); }},
          {"sigma", [&](const YAML::Node& v) { o.sigma = r.real(v, "sigma"); nonneg(r, v, "sigma", o.sigma); }},
          {"bias_mode",
           [&](const YAML::Node& v) {
             const auto s = r.text(v, "bias_mode");
             auto m = parse_bias_mode(s);
             if (!m) r.fail(v, "unknown bias_mode '" + s + "' (zero, fixed_direction, gradient_aligned)");
             o.bias_mode = *m;
           }},
          {"noise_mode", [&](const YAML::Node& v) {
             const auto s = r.text(v, "noise_mode");
             auto m = parse_noise_mode(s);
             if (!m) r.fail(v, "unknown noise_mode '" + s + "' (zero, gaussian_isotropic)");
             o.noise_mode = *m;
           }}});
}

void read_theory(const Reader& r, const YAML::Node& node, TheorySpec& t)
{
  r.each(node, "theory",
         {{"auto", [&](const YAML::Node& v) { t.auto_configure = r.boolean(v, "auto"); }},
          {"overlay", [&](const YAML::Node& v) { t.overlay = r.boolean(v, "overlay"); }},
          {"eps", [&](const YAML::Node& v) { t.eps = r.real(v, "eps"); positive(r, v, "eps", t.eps); }},
          {"eps_relative", [&](const YAML::Node& v) { t.eps_relative = r.boolean(v, "eps_relative"); }},
          {"eps_y", [&](const YAML::Node& v) { t.eps_y = r.real(v, "eps_y"); positive(r, v, "eps_y", *t.eps_y); }},
          {"delta_prime",
           [&](const YAML::Node& v) { t.delta_prime = r.real(v, "delta_prime"); nonneg(r, v, "delta_prime", t.delta_prime); }},
          {"delta_prime_y",
           [&](const YAML::Node& v) {
             t.delta_prime_y = r.real(v, "delta_prime_y");
             nonneg(r, v, "delta_prime_y", *t.delta_prime_y);
           }},
          {"inner_gap_bound", [&](const YAML::Node& v) {
             t.inner_gap_bound = r.real(v, "inner_gap_bound");
             positive(r, v, "inner_gap_bound", *t.inner_gap_bound);
           }}});
}

void read_root(const Reader& r, const YAML::Node& root, ExperimentConfig& c)
{
  r.each(root, "config",
         {{"problem", [&](const YAML::Node& v) { read_problem(r, v, c.problem); }},
          {"graph", [&](const YAML::Node& v) { read_graph(r, v, c.graph); }},
          {"algorithm", [&](const YAML::Node& v) { read_algorithm(r, v, c.algorithm); }},
          {"oracle", [&](const YAML::Node& v) { read_oracle(r, v, c.oracle); }},
          {"theory", [&](const YAML::Node& v) { read_theory(r, v, c.theory); }},
          {"seeds",
           [&](const YAML::Node& v) {
             c.seeds.clear();
             if (v.IsSequence()) {
               for (const auto& e : v) c.seeds.push_back(r.seed(e, "seeds"));
             } else {
               const auto count = r.integer(v, "seeds");
               for (std::int64_t s = 0; s < count; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
             }
             if (c.seeds.empty()) r.fail(v, "'seeds' must not be empty");
             std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
             if (uniq.size() != c.seeds.size()) r.fail(v, "'seeds' contains duplicates");
           }},
          {"output", [&](const YAML::Node& v) { c.output = r.text(v, "output"); }},
          {"record_wall_time", [&](const YAML::Node& v) { c.record_wall_time = r.boolean(v, "record_wall_time"); }},
          {"threads", [&](const YAML::Node& v) { c.threads = to_int(r, v, "threads"); nonneg(r, v, "threads", c.threads); }}});
}

ExperimentConfig parse_node(const YAML::Node& root, const std::string& source)
{
  ExperimentConfig c;
  c.source = source;
  const Reader r(source);
  if (!root || root.IsNull()) throw ConfigError(source, 0, "empty configuration");
  read_root(r, root, c);
  check_config(c);
  return c;
}

}  // namespace

ExperimentConfig load_config(const std::string& path)
{
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError(path, 0, "cannot open file");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path, e.mark.line + 1, e.msg);
  }
  return parse_node(root, path);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  return parse_node(root, source);
}

void check_config(const ExperimentConfig& c)
{
  auto bad = [&](const std::string& msg) { throw ConfigError(c.source, 0, msg); };
  const auto& a = c.algorithm;
  const bool saddle = c.problem.kind == ProblemKind::RobustLS;
  if (a.kind == AlgorithmKind::MGDA && !saddle) bad("algorithm 'mgda' needs problem kind 'robust_ls'");
  if (a.kind == AlgorithmKind::DGD && saddle) bad("algorithm 'dgd' needs a minimization problem; use 'mgda'");
  if (c.seeds.empty()) bad("'seeds' must not be empty");
  if (c.theory.auto_configure && c.theory.delta_prime <= 0.0)
    bad("theory.auto needs delta_prime > 0 (T is unbounded at delta_prime = 0)");
}

namespace {

struct Axis {
  std::string path;
  bool integral;
  std::function<void(ExperimentConfig&, double)> set;
};

const std::vector<std::pair<std::string, Axis>>& axes()
{
  static const std::vector<std::pair<std::string, Axis>> table = [] {
    std::vector<std::pair<std::string, Axis>> t;
    auto add = [&](std::string alias, std::string path, bool integral, std::function<void(ExperimentConfig&, double)> f) {
      Axis ax{path, integral, f};
      if (!alias.empty()) t.emplace_back(std::move(alias), ax);
      t.emplace_back(path, ax);
    };
    add("n", "problem.n", true, [](auto& c, double v) { c.problem.n = static_cast<int>(v); });
    add("d", "problem.d", true, [](auto& c, double v) { c.problem.d = static_cast<int>(v); });
    add("d_x", "problem.d_x", true, [](auto& c, double v) { c.problem.d = static_cast<int>(v); });
    add("d_y", "problem.d_y", true, [](auto& c, double v) { c.problem.d_y = static_cast<int>(v); });
    add("d_i", "problem.d_i", true, [](auto& c, double v) { c.problem.d_i = static_cast<int>(v); });
    add("alpha", "problem.alpha", false, [](auto& c, double v) { c.problem.alpha = v; });
    add("curvature", "problem.curvature", false, [](auto& c, double v) { c.problem.curvature = v; });
    add("", "problem.seed", true, [](auto& c, double v) { c.problem.seed = static_cast<std::uint64_t>(v); });
    add("tau", "graph.tau", true, [](auto& c, double v) { c.graph.params.tau = static_cast<int>(v); });
    add("edge_probability", "graph.edge_probability", false,
        [](auto& c, double v) { c.graph.params.edge_probability = v; });
    add("period", "graph.period", true, [](auto& c, double v) { c.graph.params.period = static_cast<int>(v); });
    add("", "graph.seed", true, [](auto& c, double v) { c.graph.params.seed = static_cast<std::uint64_t>(v); });
    add("gamma", "algorithm.gamma", false, [](auto& c, double v) { c.algorithm.gamma = v; });
    add("N", "algorithm.N", true, [](auto& c, double v) { c.algorithm.N = static_cast<std::int64_t>(v); });
    add("T", "algorithm.T", true, [](auto& c, double v) {
      c.algorithm.T = static_cast<std::int64_t>(v);
      c.algorithm.T_list.clear();
    });
    add("gamma_x", "algorithm.gamma_x", false, [](auto& c, double v) { c.algorithm.gamma_x = v; });
    add("gamma_y", "algorithm.gamma_y", false, [](auto& c, double v) { c.algorithm.gamma_y = v; });
    add("N_x", "algorithm.N_x", true, [](auto& c, double v) { c.algorithm.N_x = static_cast<std::int64_t>(v); });
    add("N_y", "algorithm.N_y", true, [](auto& c, double v) { c.algorithm.N_y = static_cast<std::int64_t>(v); });
    add("T_x", "algorithm.T_x", true, [](auto& c, double v) { c.algorithm.T_x = static_cast<std::int64_t>(v); });
    add("T_y", "algorithm.T_y", true, [](auto& c, double v) { c.algorithm.T_y = static_cast<std::int64_t>(v); });
    add("delta", "oracle.delta", false, [](auto& c, double v) { c.oracle.delta = v; });
    add("sigma", "oracle.sigma", false, [](auto& c, double v) { c.oracle.sigma = v; });
    add("eps", "theory.eps", false, [](auto& c, double v) { c.theory.eps = v; });
    add("delta_prime", "theory.delta_prime", false, [](auto& c, double v) { c.theory.delta_prime = v; });
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> axis_names()
{
  std::vector<std::string> out;
  for (const auto& [name, _] : axes()) out.push_back(name);
  return out;
}

void set_axis(ExperimentConfig& c, const std::string& axis, double value)
{
  for (const auto& [name, ax] : axes()) {
    if (name != axis) continue;
    if (!std::isfinite(value)) throw ConfigError(c.source, 0, "axis '" + axis + "' needs a finite value");
    if (ax.integral && (value != std::floor(value) || value < 0.0))
      throw ConfigError(c.source, 0, "axis '" + axis + "' needs nonnegative integer values");
    ax.set(c, value);
    check_config(c);
    return;
  }
  std::string known;
  for (const auto& n : axis_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError(c.source, 0, "unknown sweep axis '" + axis + "' (known: " + known + ")");
}

Json config_to_json(const ExperimentConfig& c)
{
  Json j;
  const auto& p = c.problem;
  j["problem"] = {{"kind", to_string(p.kind)}, {"n", p.n},          {"d", p.d},
                  {"d_y", p.d_y},              {"d_i", p.d_i == 0 ? p.d : p.d_i},
                  {"alpha", p.alpha},          {"curvature", p.curvature},
                  {"seed", p.seed},            {"vary_with_seed", p.vary_with_seed}};
  const auto& g = c.graph;
  j["graph"] = {{"kind", to_string(g.kind)},
                {"base", to_string(g.params.base)},
                {"tau", g.params.tau},
                {"seed", g.params.seed},
                {"edge_probability", g.params.edge_probability},
                {"period", g.params.period},
                {"horizon", g.horizon},
                {"vary_with_seed", g.vary_with_seed}};
  const auto& a = c.algorithm;
  Json alg = {{"kind", to_string(a.kind)}, {"record_every", a.record_every}, {"auto_project", a.auto_project},
              {"init", to_string(a.init)}};
  if (a.kind == AlgorithmKind::MGDA || (a.kind == AlgorithmKind::Centralized && p.kind == ProblemKind::RobustLS)) {
    alg["gamma_x"] = a.gamma_x;
    alg["gamma_y"] = a.gamma_y;
    alg["N_x"] = a.N_x;
    alg["N_y"] = a.N_y;
    alg["T_x"] = a.T_x;
    alg["T_y"] = a.T_y;
  } else {
    alg["gamma"] = a.gamma;
    alg["N"] = a.N;
    if (a.T_list.empty())
      alg["T"] = a.T;
    else
      alg["T"] = a.T_list;
  }
  j["algorithm"] = alg;
  j["oracle"] = {{"delta", c.oracle.delta},
                 {"sigma", c.oracle.sigma},
                 {"bias_mode", to_string(c.oracle.bias_mode)},
                 {"noise_mode", to_string(c.oracle.noise_mode)}};
  Json th = {{"auto", c.theory.auto_configure}, {"overlay", c.theory.overlay},  {"eps", c.theory.eps},
             {"eps_relative", c.theory.eps_relative}, {"delta_prime", c.theory.delta_prime}};
  if (c.theory.delta_prime_y) th["delta_prime_y"] = *c.theory.delta_prime_y;
  if (c.theory.eps_y) th["eps_y"] = *c.theory.eps_y;
  if (c.theory.inner_gap_bound) th["inner_gap_bound"] = *c.theory.inner_gap_bound;
  j["theory"] = th;
  j["seeds"] = c.seeds;
  j["output"] = c.output;
  j["record_wall_time"] = c.record_wall_time;
  return j;
}

std::string config_json(const ExperimentConfig& config, int indent)
{
  return config_to_json(config).dump(indent);
}

}  // namespace pldo::harness
