#include "core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace rrg {

RegularGraph::RegularGraph(int n, int d, std::vector<Edge> edges)
    : n_(n), d_(d), edges_(std::move(edges)) {
  if (n <= 0 || d < 1) throw std::invalid_argument("graph: bad n or d");
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
    throw std::invalid_argument("graph: n*d must be even (parity)");
  adj_.assign(n_, {});
  std::sort(edges_.begin(), edges_.end());
  for (const auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      throw std::invalid_argument("graph: vertex id out of range");
    if (u >= v) throw std::invalid_argument("graph: edge not stored as u < v");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("graph: repeated edge");
  for (int v = 0; v < n_; ++v) {
    if (static_cast<int>(adj_[v].size()) != d_)
      throw std::invalid_argument("graph: vertex degree != d");
    std::sort(adj_[v].begin(), adj_[v].end());
  }
}

bool RegularGraph::has_edge(int u, int v) const {
  if (u == v) return false;
  const auto& nb = adj_[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

RegularGraph RegularGraph::sample_uniform(int n, int d, Rng& rng,
                                          std::int64_t max_attempts,
                                          std::int64_t* attempts_used) {
  if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
    throw std::invalid_argument("sample_uniform: n*d must be even (parity)");
  if (d < 3) throw std::invalid_argument("sample_uniform: degree must be >= 3");
  if (d >= n) throw std::invalid_argument("sample_uniform: need d < n");

  // Pairing model: shuffle the n*d half-edges, pair consecutively, reject the
  // whole pairing on any loop or repeated edge. Acceptance is Theta(1) for
  // fixed d, so the retry loop terminates quickly in practice.
  std::vector<int> points(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < d; ++k) points[static_cast<std::size_t>(v) * d + k] = v;

  std::vector<Edge> edges;
  edges.reserve(points.size() / 2);

  for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    rng.shuffle(points);
    edges.clear();
    bool simple = true;
    for (std::size_t k = 0; k + 1 < points.size(); k += 2) {
      int u = points[k], v = points[k + 1];
      if (u == v) {
        simple = false;
        break;
      }
      if (u > v) std::swap(u, v);
      edges.emplace_back(u, v);
    }
    if (simple) {
      std::sort(edges.begin(), edges.end());
      if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        simple = false;
    }
    if (simple) {
      if (attempts_used) *attempts_used = attempt;
      return RegularGraph(n, d, std::move(edges));
    }
  }
  throw std::runtime_error(
      "sample_uniform: rejection budget exhausted (pathological parameters?)");
}

RegularGraph RegularGraph::complete(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return RegularGraph(n, n - 1, std::move(edges));
}

bool Subgraph::contains_vertex(int v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj,
                               const std::vector<int>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> frontier;
  for (int s : sources) {
    dist[s] = 0;
    frontier.push(s);
  }
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int w : adj[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

Subgraph ball(const std::vector<std::vector<int>>& adj,
              const std::vector<int>& sources, int r) {
  if (r < 0) throw std::invalid_argument("ball: negative radius");
  std::vector<int> dist = bfs_distances(adj, sources);
  Subgraph s;
  for (std::size_t v = 0; v < adj.size(); ++v)
    if (dist[v] >= 0 && dist[v] <= r) s.vertices.push_back(static_cast<int>(v));
  for (int u : s.vertices)
    for (int w : adj[u])
      if (u < w && dist[w] >= 0 && dist[w] <= r) s.edges.emplace_back(u, w);
  std::sort(s.edges.begin(), s.edges.end());
  if (sources.size() == 1) s.root = sources.front();
  return s;
}

Subgraph ball(const RegularGraph& g, int v, int r) {
  if (v < 0 || v >= g.vertex_count())
    throw std::invalid_argument("ball: vertex out of range");
  return ball(g.adjacency(), std::vector<int>{v}, r);
}

int excess(const Subgraph& s) {
  if (s.vertices.empty()) return 0;
  // Count components with a union-find over the subgraph's vertex list.
  std::vector<int> parent(s.vertices.size());
  for (std::size_t i = 0; i < parent.size(); ++i)
    parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto index_of = [&](int v) {
    return static_cast<int>(std::lower_bound(s.vertices.begin(),
                                             s.vertices.end(), v) -
                            s.vertices.begin());
  };
  int components = static_cast<int>(s.vertices.size());
  for (const auto& [u, v] : s.edges) {
    int a = find(index_of(u)), b = find(index_of(v));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return static_cast<int>(s.edges.size()) -
         static_cast<int>(s.vertices.size()) + components;
}

bool is_tree(const Subgraph& s) {
  if (s.vertices.empty()) return false;
  return excess(s) == 0 &&
         s.edges.size() + 1 == s.vertices.size();  // acyclic and connected
}

OmegaBarReport omega_bar_census(const RegularGraph& g, double c, int omega_d,
                                int radius_override) {
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("omega_bar_census: need 0 < c < 1");
  const int n = g.vertex_count();
  const int d = g.degree();
  OmegaBarReport report;
  report.excess_cap = omega_d;
  if (radius_override > 0) {
    report.radius = radius_override;
  } else {
    double r = std::floor((c / 4.0) * std::log(static_cast<double>(n)) /
                          std::log(static_cast<double>(d - 1)));
    report.radius = std::max(1, static_cast<int>(r));
  }
  report.bad_vertex_threshold = std::pow(static_cast<double>(n), c);
  for (int v = 0; v < n; ++v) {
    Subgraph b = ball(g, v, report.radius);
    int ex = excess(b);
    report.max_excess = std::max(report.max_excess, ex);
    if (ex > 0) ++report.bad_vertex_count;  // any cycle spoils the tree ball
  }
  report.holds =
      static_cast<double>(report.bad_vertex_count) <=
          report.bad_vertex_threshold &&
      report.max_excess <= report.excess_cap;
  return report;
}

Minor remove_vertices(const RegularGraph& g, const std::vector<int>& s) {
  std::vector<char> removed(g.vertex_count(), 0);
  for (int v : s) {
    if (v < 0 || v >= g.vertex_count())
      throw std::invalid_argument("remove_vertices: vertex out of range");
    removed[v] = 1;
  }
  Minor m;
  m.new_of.assign(g.vertex_count(), -1);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (!removed[v]) {
      m.new_of[v] = m.n++;
      m.orig_of.push_back(v);
    }
  }
  m.adj.assign(m.n, {});
  for (const auto& [u, v] : g.edges()) {
    if (removed[u] || removed[v]) continue;
    int a = m.new_of[u], b = m.new_of[v];
    m.adj[a].push_back(b);
    m.adj[b].push_back(a);
    m.edges.emplace_back(a, b);
  }
  for (auto& nb : m.adj) std::sort(nb.begin(), nb.end());
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

int distance(const std::vector<std::vector<int>>& adj, int u, int v) {
  if (u == v) return 0;
  std::vector<int> dist = bfs_distances(adj, {u});
  return dist[v];
}

int distance(const RegularGraph& g, int u, int v) {
  if (u < 0 || v < 0 || u >= g.vertex_count() || v >= g.vertex_count())
    throw std::invalid_argument("distance: vertex out of range");
  return distance(g.adjacency(), u, v);
}

}  // namespace rrg
