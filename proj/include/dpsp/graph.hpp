#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dpsp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Undirected simple graph structure; vertex ids are 0-based and dense.
struct Topology {
  std::size_t n = 0;
  std::vector<Edge> edges;
};

// Topology plus strictly positive edge weights, aligned with `edges`.
// weight_bound, when set, is the public bound A with all weights in (0, A].
struct WeightedGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<double> weights;
  std::optional<double> weight_bound;

  Topology topology() const { return Topology{n, edges}; }
};

inline void validate(const Topology& t) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(t.edges.size() * 2);
  for (const auto& [u, v] : t.edges) {
    if (u >= t.n || v >= t.n) throw std::invalid_argument("graph: edge endpoint out of range");
    if (u == v) throw std::invalid_argument("graph: self loop");
    std::uint64_t key = (static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v);
    if (!seen.insert(key).second) throw std::invalid_argument("graph: duplicate edge");
  }
}

inline void validate(const WeightedGraph& g) {
  validate(Topology{g.n, g.edges});
  if (g.weights.size() != g.edges.size())
    throw std::invalid_argument("graph: weight count does not match edge count");
  for (double w : g.weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("graph: weights must be finite and strictly positive");
    if (g.weight_bound && w > *g.weight_bound + 1e-15)
      throw std::invalid_argument("graph: weight exceeds declared bound");
  }
  if (g.weight_bound && !(*g.weight_bound > 0.0))
    throw std::invalid_argument("graph: weight bound must be positive");
}

// CSR adjacency; nbr/eid run in edge-list order within each vertex bucket so
// traversal order (and thus every tie-break downstream) is deterministic.
struct Adjacency {
  std::vector<std::uint32_t> offsets;  // n + 1
  std::vector<std::uint32_t> nbr;
  std::vector<std::uint32_t> eid;

  Adjacency() = default;
  Adjacency(std::size_t n, const std::vector<Edge>& edges) {
    offsets.assign(n + 1, 0);
    for (const auto& [u, v] : edges) { ++offsets[u + 1]; ++offsets[v + 1]; }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    nbr.resize(2 * edges.size());
    eid.resize(2 * edges.size());
    std::vector<std::uint32_t> cur(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
      auto [u, v] = edges[e];
      nbr[cur[u]] = v; eid[cur[u]] = e; ++cur[u];
      nbr[cur[v]] = u; eid[cur[v]] = e; ++cur[v];
    }
  }
};

// Dense symmetric distance matrix with +inf for unreachable pairs.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major, n * n

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n_, double fill = kInf) : n(n_), values(n_ * n_, fill) {}

  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// --- graph file format ------------------------------------------------------
// First data line: "n m". Then m lines "u v w" with 0-based ids. Lines whose
// first non-space character is '#' are comments. Weights are written with 17
// significant digits so a write/read round trip is exact.

inline WeightedGraph read_graph(std::istream& in) {
  WeightedGraph g;
  std::string line;
  bool have_header = false;
  std::size_t m = 0;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      long long n_in = -1, m_in = -1;
      if (!(ls >> n_in >> m_in) || n_in < 0 || m_in < 0)
        throw std::invalid_argument("graph file: malformed header line");
      g.n = static_cast<std::size_t>(n_in);
      m = static_cast<std::size_t>(m_in);
      have_header = true;
      continue;
    }
    long long u = -1, v = -1;
    double w = 0.0;
    if (!(ls >> u >> v >> w) || u < 0 || v < 0)
      throw std::invalid_argument("graph file: malformed edge line");
    g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    g.weights.push_back(w);
  }
  if (!have_header) throw std::invalid_argument("graph file: missing header line");
  if (g.edges.size() != m) throw std::invalid_argument("graph file: edge count does not match header");
  validate(g);
  return g;
}

inline WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("graph file: cannot open " + path);
  return read_graph(in);
}

inline void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << g.n << ' ' << g.edges.size() << '\n';
  char buf[64];
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", g.weights[e]);
    out << g.edges[e].first << ' ' << g.edges[e].second << ' ' << buf << '\n';
  }
}

inline void write_graph_file(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("graph file: cannot open " + path + " for writing");
  write_graph(out, g);
}

// --- unweighted primitives ---------------------------------------------------

// Hop counts from source by BFS; +inf marks unreachable vertices.
inline std::vector<double> hop_distances(const Topology& t, std::uint32_t source,
                                         const Adjacency* adj = nullptr) {
  if (source >= t.n) throw std::invalid_argument("hop_distances: source out of range");
  Adjacency local;
  if (!adj) { local = Adjacency(t.n, t.edges); adj = &local; }
  std::vector<double> dist(t.n, kInf);
  std::vector<std::uint32_t> queue;
  queue.reserve(t.n);
  dist[source] = 0.0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t v = queue[head];
    for (std::uint32_t k = adj->offsets[v]; k < adj->offsets[v + 1]; ++k) {
      std::uint32_t u = adj->nbr[k];
      if (dist[u] == kInf) { dist[u] = dist[v] + 1.0; queue.push_back(u); }
    }
  }
  return dist;
}

namespace detail {

// Ball members within floor(radius) hops of center, restricted to vertices
// with alive[v] != 0 (center must be alive). Aborts early and reports
// exceeded=true once more than abort_above members are found.
struct BallResult {
  std::vector<std::uint32_t> members;  // sorted by id
  bool exceeded = false;
};

inline BallResult bounded_ball(const Adjacency& adj, const std::vector<std::uint8_t>& alive,
                               std::uint32_t center, double radius, std::size_t abort_above) {
  BallResult res;
  if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
  std::uint64_t hop_limit = radius >= 4e9 ? std::uint64_t(4e9) : static_cast<std::uint64_t>(std::floor(radius));
  std::vector<std::uint32_t> frontier{center}, next;
  std::vector<std::uint8_t> seen(alive.size(), 0);
  seen[center] = 1;
  res.members.push_back(center);
  for (std::uint64_t depth = 0; depth < hop_limit && !frontier.empty(); ++depth) {
    next.clear();
    for (std::uint32_t v : frontier) {
      for (std::uint32_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) {
        std::uint32_t u = adj.nbr[k];
        if (seen[u] || !alive[u]) continue;
        seen[u] = 1;
        next.push_back(u);
        res.members.push_back(u);
        if (res.members.size() > abort_above) { res.exceeded = true; return res; }
      }
    }
    frontier.swap(next);
  }
  std::sort(res.members.begin(), res.members.end());
  return res;
}

}  // namespace detail

// Vertices within floor(radius) hops of center, sorted by id; contains center.
inline std::vector<std::uint32_t> ball(const Topology& t, std::uint32_t center, double radius) {
  if (center >= t.n) throw std::invalid_argument("ball: center out of range");
  if (radius < 0.0) throw std::invalid_argument("ball: negative radius");
  Adjacency adj(t.n, t.edges);
  std::vector<std::uint8_t> alive(t.n, 1);
  return detail::bounded_ball(adj, alive, center, radius, t.n).members;
}

inline bool is_connected(const Topology& t) {
  if (t.n == 0) return true;
  auto d = hop_distances(t, 0);
  for (double x : d) if (x == kInf) return false;
  return true;
}

// --- weighted primitives ------------------------------------------------------

// Single-source Dijkstra; requires nonnegative weights.
inline std::vector<double> dijkstra_from(const Topology& t, const std::vector<double>& weights,
                                         std::uint32_t source, const Adjacency* adj = nullptr) {
  if (source >= t.n) throw std::invalid_argument("dijkstra_from: source out of range");
  if (weights.size() != t.edges.size())
    throw std::invalid_argument("dijkstra_from: weight count mismatch");
  Adjacency local;
  if (!adj) { local = Adjacency(t.n, t.edges); adj = &local; }
  std::vector<double> dist(t.n, kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    for (std::uint32_t k = adj->offsets[v]; k < adj->offsets[v + 1]; ++k) {
      std::uint32_t u = adj->nbr[k];
      double w = weights[adj->eid[k]];
      if (w < 0.0) throw std::invalid_argument("dijkstra_from: negative weight");
      double nd = dv + w;
      if (nd < dist[u]) { dist[u] = nd; pq.emplace(nd, u); }
    }
  }
  return dist;
}

// Exact all-pairs shortest paths by repeated Dijkstra. Rounding inside the
// relaxation depends on the source, so the entry for (u, v) is always the one
// computed from the smaller endpoint, making the matrix symmetric bit for bit.
inline DistanceMatrix exact_apsp(const WeightedGraph& g) {
  validate(g);
  Topology t = g.topology();
  Adjacency adj(g.n, g.edges);
  DistanceMatrix out(g.n);
  for (std::uint32_t s = 0; s < g.n; ++s) {
    auto d = dijkstra_from(t, g.weights, s, &adj);
    for (std::uint32_t v = s; v < g.n; ++v) {
      out.values[static_cast<std::size_t>(s) * g.n + v] = d[v];
      out.values[static_cast<std::size_t>(v) * g.n + s] = d[v];
    }
  }
  return out;
}

// Minimum total weight over walks from source using at most max_hops edges,
// to every target at once. Realized as max_hops rounds of relaxation over
// layered states, which is exact for arbitrary (including negative) weights
// because the hop count is bounded. Stops early at a fixed point.
inline std::vector<double> hop_bounded_distances(const Topology& t, const std::vector<double>& weights,
                                                 std::uint32_t source, std::uint64_t max_hops) {
  if (source >= t.n) throw std::invalid_argument("hop_bounded_distances: source out of range");
  if (weights.size() != t.edges.size())
    throw std::invalid_argument("hop_bounded_distances: weight count mismatch");
  std::vector<double> dist(t.n, kInf);
  dist[source] = 0.0;
  std::vector<double> cur = dist;
  for (std::uint64_t round = 0; round < max_hops; ++round) {
    bool changed = false;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
      auto [a, b] = t.edges[e];
      double w = weights[e];
      double da = dist[a] + w;
      if (da < cur[b]) { cur[b] = da; changed = true; }
      double db = dist[b] + w;
      if (db < cur[a]) { cur[a] = db; changed = true; }
    }
    dist = cur;
    if (!changed) break;
  }
  return dist;
}

inline double hop_bounded_shortest_path(const Topology& t, const std::vector<double>& weights,
                                        std::uint32_t u, std::uint32_t v, std::uint64_t max_hops) {
  if (v >= t.n) throw std::invalid_argument("hop_bounded_shortest_path: vertex out of range");
  return hop_bounded_distances(t, weights, u, max_hops)[v];
}

namespace detail {

// Hop-bounded relaxation for a block of sources at once. dist is row-major
// (n_src x n). The working layout is vertex-major with the source block
// contiguous (index v * bs + s), so each edge relaxes bs lanes of adjacent
// doubles; results are independent of the block split.
inline void hop_bounded_block(const Topology& t, const std::vector<double>& weights,
                              const std::uint32_t* sources, std::size_t n_src,
                              std::uint64_t max_hops, double* dist) {
  const std::size_t n = t.n;
  constexpr std::size_t kBlock = 8;
  for (std::size_t s0 = 0; s0 < n_src; s0 += kBlock) {
    const std::size_t bs = std::min(kBlock, n_src - s0);
    std::vector<double> cur(bs * n, kInf), prev(bs * n, kInf);
    for (std::size_t s = 0; s < bs; ++s) cur[static_cast<std::size_t>(sources[s0 + s]) * bs + s] = 0.0;
    for (std::uint64_t round = 0; round < max_hops; ++round) {
      std::copy(cur.begin(), cur.end(), prev.begin());
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const std::size_t a = t.edges[e].first, b = t.edges[e].second;
        const double w = weights[e];
        const double* pa = prev.data() + a * bs;
        const double* pb = prev.data() + b * bs;
        double* ca = cur.data() + a * bs;
        double* cb = cur.data() + b * bs;
        for (std::size_t s = 0; s < bs; ++s) {
          double da = pa[s] + w;
          if (da < cb[s]) cb[s] = da;
          double db = pb[s] + w;
          if (db < ca[s]) ca[s] = db;
        }
      }
      if (std::memcmp(cur.data(), prev.data(), cur.size() * sizeof(double)) == 0) break;
    }
    for (std::size_t s = 0; s < bs; ++s)
      for (std::size_t v = 0; v < n; ++v) dist[(s0 + s) * n + v] = cur[v * bs + s];
  }
}

}  // namespace detail

}  // namespace dpsp
