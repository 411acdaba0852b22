#include "nlc/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

namespace nlc {

namespace {

std::string format_pair(int u, int v) {
  std::ostringstream os;
  os << "(" << u + 1 << "," << v + 1 << ")";  // 1-based in messages
  return os.str();
}

}  // namespace

Graph::Graph(int n, std::vector<std::pair<int, int>> edge_set) : n_(n) {
  if (n < 2) throw graph_error("graph needs at least 2 vertices");
  std::set<std::pair<int, int>> dedup;
  for (auto [u, v] : edge_set) {
    if (u == v) throw graph_error("self loop at vertex " + std::to_string(u + 1));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw graph_error("edge endpoint out of range: " + format_pair(u, v));
    dedup.insert({std::min(u, v), std::max(u, v)});
  }
  neighbors_.assign(n, {});
  edges_.assign(dedup.begin(), dedup.end());
  for (auto [u, v] : edges_) {
    neighbors_[u].push_back(v);
    neighbors_[v].push_back(u);
  }
  for (int i = 0; i < n; ++i) {
    if (neighbors_[i].empty())
      throw graph_error("isolated vertex " + std::to_string(i + 1) +
                        " (normalized adjacency undefined)");
    std::sort(neighbors_[i].begin(), neighbors_[i].end());
  }
  description_ = "edge_list(n=" + std::to_string(n) + ",m=" + std::to_string(edges_.size()) + ")";
}

Graph with_description(Graph g, std::string d) {
  g.description_ = std::move(d);
  return g;
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return with_description(Graph(n, std::move(edges)), "complete(" + std::to_string(n) + ")");
}

Graph Graph::line(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return with_description(Graph(n, std::move(edges)), "line(" + std::to_string(n) + ")");
}

Graph Graph::complete_bipartite(int p, int q) {
  if (p < 1 || q < 1) throw graph_error("complete_bipartite sides must be positive");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) edges.emplace_back(i, p + j);
  return with_description(Graph(p + q, std::move(edges)),
                          "complete_bipartite(" + std::to_string(p) + "," + std::to_string(q) + ")");
}

Graph Graph::erdos_renyi(int n, double p, Rng& rng, int max_retries) {
  if (n < 2) throw graph_error("erdos_renyi needs n >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw graph_error("erdos_renyi edge probability must be in [0,1]");
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(p)) edges.emplace_back(i, j);
    bool isolated = false;
    {
      std::vector<int> deg(n, 0);
      for (auto [u, v] : edges) {
        ++deg[u];
        ++deg[v];
      }
      isolated = std::any_of(deg.begin(), deg.end(), [](int d) { return d == 0; });
    }
    if (isolated) continue;
    Graph g(n, std::move(edges));
    if (!g.connected()) continue;
    std::ostringstream d;
    d << "erdos_renyi(" << n << "," << p << ")";
    return with_description(std::move(g), d.str());
  }
  throw graph_error("erdos_renyi: no connected sample within " + std::to_string(max_retries) +
                    " retries (p too small for n?)");
}

Graph Graph::load_edge_list(std::istream& in) {
  std::vector<std::pair<int, int>> edges;
  int max_vertex = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) continue;  // blank or comment-only line
    if (!(ls >> v)) throw graph_error("edge list line " + std::to_string(lineno) + ": expected two indices");
    std::string extra;
    if (ls >> extra)
      throw graph_error("edge list line " + std::to_string(lineno) +
                        ": trailing token '" + extra + "' (weighted edges are not supported)");
    if (u < 1 || v < 1) throw graph_error("edge list line " + std::to_string(lineno) + ": indices are 1-based");
    edges.emplace_back(static_cast<int>(u - 1), static_cast<int>(v - 1));
    max_vertex = std::max({max_vertex, static_cast<int>(u), static_cast<int>(v)});
  }
  if (edges.empty()) throw graph_error("edge list: no edges found");
  return Graph(max_vertex, std::move(edges));
}

bool Graph::adjacent(int i, int j) const {
  const auto& ni = neighbors_[i];
  return std::binary_search(ni.begin(), ni.end(), j);
}

bool Graph::connected() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : neighbors_[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n_;
}

std::vector<double> Graph::adjacency_matrix() const {
  std::vector<double> a(static_cast<size_t>(n_) * n_, 0.0);
  for (auto [u, v] : edges_) {
    a[static_cast<size_t>(u) * n_ + v] = 1.0;
    a[static_cast<size_t>(v) * n_ + u] = 1.0;
  }
  return a;
}

DerivedMatrices derived_matrices(const Graph& g) {
  const int n = g.size();
  DerivedMatrices m;
  m.n = n;
  m.normalized_adjacency.assign(static_cast<size_t>(n) * n, 0.0);
  m.laplacian.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double inv_d = 1.0 / g.degree(i);
    m.laplacian[static_cast<size_t>(i) * n + i] = g.degree(i);
    for (int j : g.neighbors(i)) {
      m.normalized_adjacency[static_cast<size_t>(i) * n + j] = inv_d;
      m.laplacian[static_cast<size_t>(i) * n + j] = -1.0;
    }
  }
  return m;
}

EigenSummary spectral_check(const Graph& g, double tol) {
  if (!g.connected()) throw graph_error("spectral_check requires a connected graph");
  const int n = g.size();

  // D^-1/2 A D^-1/2 shares the spectrum of D^-1 A and is symmetric.
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : g.edges()) {
    const double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * g.degree(v));
    sym(u, v) = w;
    sym(v, u) = w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);

  EigenSummary out;
  out.tol = tol;
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

  int near_unit = 0;
  double second = 0.0;
  for (double lam : out.eigenvalues) {
    if (std::abs(lam - 1.0) <= tol)
      ++near_unit;
    else
      second = std::max(second, std::abs(lam));
  }
  out.simple_unit_eigenvalue = (near_unit == 1);
  out.second_largest_modulus = second;
  out.strict_contraction = out.simple_unit_eigenvalue && second < 1.0 - tol;
  out.bipartite_boundary = !out.eigenvalues.empty() && std::abs(out.eigenvalues.front() + 1.0) <= tol;

  // Row stochasticity: D^-1 A 1 = 1.
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j : g.neighbors(i)) {
      (void)j;
      sum += 1.0 / g.degree(i);
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  out.row_sum_error = worst;
  return out;
}

std::vector<std::pair<int, int>> symmetric_pairs(const Graph& g) {
  const int n = g.size();
  std::vector<std::pair<int, int>> pairs;
  auto without = [](const std::vector<int>& v, int drop) {
    std::vector<int> out;
    out.reserve(v.size());
    for (int x : v)
      if (x != drop) out.push_back(x);
    return out;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g.neighbors(i) == g.neighbors(j)) {
        pairs.emplace_back(i, j);
      } else if (g.adjacent(i, j) && without(g.neighbors(i), j) == without(g.neighbors(j), i)) {
        pairs.emplace_back(i, j);
      }
    }
  }
  return pairs;
}

std::string GraphSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::complete: os << "complete(" << n << ")"; break;
    case Kind::line: os << "line(" << n << ")"; break;
    case Kind::complete_bipartite: os << "complete_bipartite(" << p_side << "," << q_side << ")"; break;
    case Kind::erdos_renyi:
      os << "erdos_renyi(" << n << "," << edge_prob;
      if (seed) os << ",seed=" << *seed;
      os << ")";
      break;
    case Kind::edge_list: os << "edge_list(n=" << edge_list_n << ",m=" << edges.size() << ")"; break;
  }
  return os.str();
}

Graph build_graph(const GraphSpec& spec, std::optional<std::uint64_t> seed_override) {
  switch (spec.kind) {
    case GraphSpec::Kind::complete:
      return Graph::complete(spec.n);
    case GraphSpec::Kind::line:
      return Graph::line(spec.n);
    case GraphSpec::Kind::complete_bipartite:
      return Graph::complete_bipartite(spec.p_side, spec.q_side);
    case GraphSpec::Kind::erdos_renyi: {
      std::optional<std::uint64_t> seed = seed_override ? seed_override : spec.seed;
      if (!seed) throw graph_error("erdos_renyi spec needs a seed");
      Rng rng(*seed);
      return Graph::erdos_renyi(spec.n, spec.edge_prob, rng);
    }
    case GraphSpec::Kind::edge_list:
      return Graph(spec.edge_list_n, spec.edges);
  }
  throw graph_error("malformed graph spec");
}

}  // namespace nlc
