#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/rng.hpp"

namespace rrg {

using Edge = std::pair<int, int>;  // stored with first < second

// Immutable simple d-regular graph on vertices 0..n-1.
class RegularGraph {
 public:
  // Validates simplicity, symmetry and d-regularity; throws on violation.
  RegularGraph(int n, int d, std::vector<Edge> edges);

  // Uniform sample over simple d-regular graphs: pairing (configuration)
  // model with whole-graph rejection of any multigraph outcome. Throws
  // std::invalid_argument on parity/degree violations and std::runtime_error
  // once `max_attempts` pairings were rejected.
  static RegularGraph sample_uniform(int n, int d, Rng& rng,
                                     std::int64_t max_attempts = 5000000,
                                     std::int64_t* attempts_used = nullptr);

  static RegularGraph complete(int n);  // K_n, degree n-1

  int vertex_count() const { return n_; }
  int degree() const { return d_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  const std::vector<std::vector<int>>& adjacency() const { return adj_; }
  bool has_edge(int u, int v) const;

  bool operator==(const RegularGraph& other) const {
    return n_ == other.n_ && d_ == other.d_ && edges_ == other.edges_;
  }

 private:
  int n_;
  int d_;
  std::vector<std::vector<int>> adj_;  // sorted neighbor lists
  std::vector<Edge> edges_;            // lexicographically sorted, u < v
};

// A subgraph of some parent graph, possibly rooted.
struct Subgraph {
  std::vector<int> vertices;  // sorted parent vertex ids
  std::vector<Edge> edges;    // sorted, endpoints drawn from `vertices`
  std::optional<int> root;

  bool contains_vertex(int v) const;
};

// Induced graph after vertex removal; degrees can drop below d.
struct Minor {
  int n = 0;
  std::vector<std::vector<int>> adj;  // sorted, on relabeled vertices
  std::vector<int> orig_of;           // minor id -> parent id
  std::vector<int> new_of;            // parent id -> minor id, -1 if removed
  std::vector<Edge> edges;            // relabeled, sorted
};

struct OmegaBarReport {
  int radius = 0;
  int excess_cap = 0;
  std::int64_t bad_vertex_count = 0;  // vertices without radius-R tree ball
  int max_excess = 0;
  double bad_vertex_threshold = 0.0;  // N^c
  bool holds = false;
};

// BFS helpers over plain adjacency lists (shared by RegularGraph and Minor).
std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj,
                               const std::vector<int>& sources);

// Induced ball of radius r around v: all parent edges among the vertices at
// distance <= r.
Subgraph ball(const RegularGraph& g, int v, int r);
Subgraph ball(const std::vector<std::vector<int>>& adj,
              const std::vector<int>& sources, int r);

// |E| - |V| + #components; the number of independent cycles.
int excess(const Subgraph& s);

bool is_tree(const Subgraph& s);

// Definition-2.4-style census: R = max(1, floor((c/4) log_{d-1} n)) unless
// `radius_override` > 0, excess cap `omega_d`.
OmegaBarReport omega_bar_census(const RegularGraph& g, double c,
                                int omega_d = 1, int radius_override = 0);

Minor remove_vertices(const RegularGraph& g, const std::vector<int>& s);

// BFS distance; -1 encodes disconnection.
int distance(const RegularGraph& g, int u, int v);
int distance(const std::vector<std::vector<int>>& adj, int u, int v);

}  // namespace rrg
