#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlc/errors.hpp"
#include "nlc/random.hpp"

namespace nlc {

/// Undirected simple graph on vertices 0..n-1 with no isolated vertices
/// (every degree is at least 1, so the normalized adjacency D^-1 A exists).
/// Immutable after construction and safe to share across threads.
class Graph {
 public:
  /// Builds from an explicit vertex count and edge set (0-based endpoints).
  /// Throws graph_error on self loops, out-of-range endpoints, or isolated
  /// vertices. Duplicate edges are collapsed.
  Graph(int n, std::vector<std::pair<int, int>> edge_set);

  static Graph complete(int n);
  static Graph line(int n);
  static Graph complete_bipartite(int p, int q);

  /// Samples G(n, p) edges from `rng`, resampling (up to `max_retries`)
  /// until the graph is connected. Throws graph_error when the budget is
  /// exhausted.
  static Graph erdos_renyi(int n, double p, Rng& rng, int max_retries = 1000);

  /// Parses the text edge-list format: one `i j` pair per line, 1-based
  /// vertex indices, `#` starts a comment. The vertex count is the largest
  /// index seen.
  static Graph load_edge_list(std::istream& in);

  int size() const { return n_; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  const std::vector<int>& neighbors(int i) const { return neighbors_[i]; }
  bool adjacent(int i, int j) const;
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  bool connected() const;

  /// Dense n*n row-major 0/1 adjacency.
  std::vector<double> adjacency_matrix() const;

  /// One-line description such as "complete(5)" or "erdos_renyi(100,0.1)".
  const std::string& describe() const { return description_; }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::pair<int, int>> edges_;
  std::string description_;

  friend Graph with_description(Graph g, std::string d);
};

/// Dense matrices derived from a graph. Row-major storage.
struct DerivedMatrices {
  int n = 0;
  std::vector<double> normalized_adjacency;  // D^-1 A, row stochastic
  std::vector<double> laplacian;             // L = D - A, symmetric, zero row sums
};

DerivedMatrices derived_matrices(const Graph& g);

/// Spectral summary of D^-1 A. The spectrum is computed from the symmetric
/// similarity transform D^-1/2 A D^-1/2, so all eigenvalues are real.
struct EigenSummary {
  std::vector<double> eigenvalues;  // ascending
  bool simple_unit_eigenvalue = false;  // exactly one eigenvalue within tol of 1
  bool strict_contraction = false;      // all other |lambda| < 1 - tol
  bool bipartite_boundary = false;      // an eigenvalue within tol of -1
  double second_largest_modulus = 0.0;  // max |lambda| over non-unit eigenvalues
  double row_sum_error = 0.0;           // max_i |sum_j (D^-1 A)_ij - 1|
  double tol = 0.0;
};

/// Requires a connected graph (throws graph_error otherwise).
EigenSummary spectral_check(const Graph& g, double tol = 1e-9);

/// All unordered pairs {i, j} with either identical neighborhoods
/// N_i = N_j, or mutually adjacent with N_i \ {j} = N_j \ {i}. Agents in
/// such pairs asymptotically synchronize for every monotone signal, so
/// these pairs are purely a property of the topology.
std::vector<std::pair<int, int>> symmetric_pairs(const Graph& g);

/// Graph construction recipe; the JSON form lives in scenario.hpp.
struct GraphSpec {
  enum class Kind { complete, line, complete_bipartite, erdos_renyi, edge_list };
  Kind kind = Kind::complete;
  int n = 0;                                 // complete, line, erdos_renyi
  int p_side = 0, q_side = 0;                // complete_bipartite
  double edge_prob = 0.0;                    // erdos_renyi
  std::optional<std::uint64_t> seed;         // erdos_renyi
  std::vector<std::pair<int, int>> edges;    // edge_list (0-based)
  int edge_list_n = 0;                       // edge_list vertex count

  std::string describe() const;
};

/// Materializes the spec. erdos_renyi requires spec.seed unless
/// `seed_override` is provided.
Graph build_graph(const GraphSpec& spec,
                  std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace nlc
