#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "accountant.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace dpsp {

// Private release for graphs with unbounded weights: noisy edge weights plus
// a noisy distance block over a uniformly sampled hitting set. Everything a
// consumer needs to answer distance queries (together with the public
// topology) lives in this struct; the true weights never leave the release
// routine.
struct UnboundedRelease {
  std::size_t n = 0;
  PrivacyBudget budget;
  UnboundedParams params;
  std::uint64_t seed = 0;       // provenance: (seed, stream id) of the stream used
  std::uint64_t stream_id = 0;
  std::vector<std::uint32_t> hitting_set;  // sorted vertex ids, size L
  std::vector<double> noisy_weights;       // one per edge, may be negative
  std::vector<double> s_distances;         // L x L row-major, symmetric, zero diagonal
  UnboundedAccounting accounting;
};

// Draw order is fixed: hitting set, then edge noise in edge order, then pair
// noise in lexicographic (i, j) order, each from its own child stream, so the
// release is a pure function of (graph, budget, mode, stream identity,
// constants). `overrides` replaces the calibrated parameters wholesale (the
// debug path; zero scales give a noiseless release whose accounting honestly
// reports an unbounded cost).
inline UnboundedRelease release_unbounded(const WeightedGraph& g, const PrivacyBudget& budget,
                                          Mode mode, const RandomStream& stream,
                                          const std::optional<UnboundedParams>& overrides = {},
                                          double c_l = 1.0, double c_t = 1.0) {
  validate(g);
  if (g.n == 0) throw std::invalid_argument("release_unbounded: empty graph");
  UnboundedRelease rel;
  rel.n = g.n;
  rel.budget = budget;
  if (overrides) {
    validate(*overrides, g.n);
    rel.params = *overrides;
    rel.params.mode = mode;
  } else {
    rel.params = calibrate_unbounded(g.n, budget, mode, c_l, c_t);
  }
  rel.seed = stream.seed();
  rel.stream_id = stream.stream_id();

  RandomStream hs_stream = stream.split(1);
  RandomStream edge_stream = stream.split(2);
  RandomStream pair_stream = stream.split(3);

  rel.hitting_set = sample_without_replacement(g.n, rel.params.hitting_set_size, hs_stream);

  rel.noisy_weights.resize(g.weights.size());
  for (std::size_t e = 0; e < g.weights.size(); ++e)
    rel.noisy_weights[e] = g.weights[e] + edge_stream.laplace(rel.params.edge_noise_scale);

  const std::size_t l = rel.hitting_set.size();
  Topology topo = g.topology();
  Adjacency adj(g.n, g.edges);
  std::vector<std::vector<double>> exact(l);
  for (std::size_t i = 0; i < l; ++i) exact[i] = dijkstra_from(topo, g.weights, rel.hitting_set[i], &adj);

  rel.s_distances.assign(l * l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      double noisy = exact[i][rel.hitting_set[j]] + pair_stream.laplace(rel.params.noise_scale_s);
      rel.s_distances[i * l + j] = noisy;
      rel.s_distances[j * l + i] = noisy;
    }
  }

  rel.accounting = audit_unbounded(rel.params, budget);
  return rel;
}

// Calibrated parameters with both noise scales forced to zero: the standard
// debug override for degeneracy tests.
inline UnboundedParams zero_noise_params(std::uint64_t n, const PrivacyBudget& budget, Mode mode,
                                         double c_l = 1.0, double c_t = 1.0) {
  UnboundedParams p = calibrate_unbounded(n, budget, mode, c_l, c_t);
  p.noise_scale_s = 0.0;
  p.edge_noise_scale = 0.0;
  return p;
}

namespace detail {

inline void check_release_shape(const UnboundedRelease& rel, const Topology& topo) {
  if (topo.n != rel.n) throw std::invalid_argument("reconstruct: topology size does not match release");
  if (topo.edges.size() != rel.noisy_weights.size())
    throw std::invalid_argument("reconstruct: edge count does not match release");
  const std::size_t l = rel.hitting_set.size();
  if (rel.s_distances.size() != l * l)
    throw std::invalid_argument("reconstruct: pair distance block has wrong shape");
  for (std::uint32_t s : rel.hitting_set)
    if (s >= rel.n) throw std::invalid_argument("reconstruct: hitting set vertex out of range");
}

// Component labels by BFS, in vertex order.
inline std::vector<std::uint32_t> component_labels(const Topology& t, const Adjacency& adj) {
  std::vector<std::uint32_t> comp(t.n, UINT32_MAX);
  std::vector<std::uint32_t> queue;
  std::uint32_t next = 0;
  for (std::uint32_t start = 0; start < t.n; ++start) {
    if (comp[start] != UINT32_MAX) continue;
    comp[start] = next;
    queue.assign(1, start);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::uint32_t v = queue[head];
      for (std::uint32_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) {
        std::uint32_t u = adj.nbr[k];
        if (comp[u] == UINT32_MAX) { comp[u] = next; queue.push_back(u); }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace detail

// Distance estimate for a single pair from the released data and the public
// topology. The short-range term is the hop-bounded walk minimum on noisy
// weights; the long-range term routes through hitting-set vertices within hop
// radius of each endpoint. Pairs that stay unresolved but share a component
// fall back to a full-length walk pass; the result is clamped to be
// nonnegative. Agrees exactly with the matching entry of reconstruct_all.
inline double reconstruct_pair(const UnboundedRelease& rel, const Topology& topo, std::uint32_t u,
                               std::uint32_t v) {
  detail::check_release_shape(rel, topo);
  if (u >= rel.n || v >= rel.n) throw std::invalid_argument("reconstruct: vertex out of range");
  if (u == v) return 0.0;
  const std::uint32_t a = std::min(u, v), b = std::max(u, v);
  const std::uint64_t r = rel.params.hop_radius;
  const std::size_t l = rel.hitting_set.size();

  auto da = hop_bounded_distances(topo, rel.noisy_weights, a, r);
  auto db = hop_bounded_distances(topo, rel.noisy_weights, b, r);
  Adjacency adj(topo.n, topo.edges);
  auto hops_a = hop_distances(topo, a, &adj);
  auto hops_b = hop_distances(topo, b, &adj);

  double est = std::min(da[b], db[a]);
  double rd = static_cast<double>(r);
  for (std::size_t i = 0; i < l; ++i) {
    if (hops_a[rel.hitting_set[i]] > rd) continue;
    for (std::size_t j = 0; j < l; ++j) {
      if (hops_b[rel.hitting_set[j]] > rd) continue;
      double through = (da[rel.hitting_set[i]] + rel.s_distances[i * l + j]) + db[rel.hitting_set[j]];
      est = std::min(est, through);
    }
  }
  if (est == kInf && hops_a[b] != kInf) {
    auto fa = hop_bounded_distances(topo, rel.noisy_weights, a, topo.n - 1);
    auto fb = hop_bounded_distances(topo, rel.noisy_weights, b, topo.n - 1);
    est = std::min(fa[b], fb[a]);
  }
  return est == kInf ? kInf : std::max(est, 0.0);
}

// All-pairs reconstruction; one hop-bounded relaxation per source plus a
// factorized minimum over hitting-set routes. `threads` only partitions the
// work; the output is identical for every thread count.
inline DistanceMatrix reconstruct_all(const UnboundedRelease& rel, const Topology& topo,
                                      unsigned threads = 1) {
  detail::check_release_shape(rel, topo);
  const std::size_t n = rel.n;
  DistanceMatrix out(n, 0.0);
  if (n <= 1) return out;
  const std::size_t l = rel.hitting_set.size();
  const std::uint64_t r = rel.params.hop_radius;
  const double rd = static_cast<double>(r);
  Adjacency adj(n, topo.edges);

  // Hitting-set membership lists: in_range[x] = indices i with hop(x, s_i) <= R.
  std::vector<std::vector<std::uint32_t>> in_range(n);
  for (std::size_t i = 0; i < l; ++i) {
    auto hops = hop_distances(topo, rel.hitting_set[i], &adj);
    for (std::size_t x = 0; x < n; ++x)
      if (hops[x] <= rd) in_range[x].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<std::uint32_t> sources(n);
  for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<std::uint32_t>(i);
  std::vector<double> short_mat(n * n);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    if (lo < hi)
      detail::hop_bounded_block(topo, rel.noisy_weights, sources.data() + lo, hi - lo, r,
                                short_mat.data() + lo * n);
  });

  // through[x * l + j] = min over i in range of x of (short(x, s_i) + pair(i, j)).
  std::vector<double> through(n * l, kInf);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t x = lo; x < hi; ++x) {
      const double* row = short_mat.data() + x * n;
      double* t_row = through.data() + x * l;
      for (std::uint32_t i : in_range[x]) {
        double base = row[rel.hitting_set[i]];
        const double* pair_row = rel.s_distances.data() + static_cast<std::size_t>(i) * l;
        for (std::size_t j = 0; j < l; ++j) t_row[j] = std::min(t_row[j], base + pair_row[j]);
      }
    }
  });

  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t a = lo; a < hi; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        double est = std::min(short_mat[a * n + b], short_mat[b * n + a]);
        const double* t_row = through.data() + a * l;
        const double* row_b = short_mat.data() + b * n;
        for (std::uint32_t j : in_range[b]) est = std::min(est, t_row[j] + row_b[rel.hitting_set[j]]);
        out.values[a * n + b] = est;
      }
    }
  });

  // Full-length pass for unresolved pairs inside one component.
  auto comp = detail::component_labels(topo, adj);
  std::vector<std::uint8_t> needs_full(n, 0);
  bool any_full = false;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (out.values[a * n + b] == kInf && comp[a] == comp[b]) {
        needs_full[a] = needs_full[b] = 1;
        any_full = true;
      }
  if (any_full) {
    std::vector<std::uint32_t> full_sources;
    for (std::size_t x = 0; x < n; ++x)
      if (needs_full[x]) full_sources.push_back(static_cast<std::uint32_t>(x));
    std::vector<double> full_mat(full_sources.size() * n);
    std::vector<std::size_t> full_index(n, SIZE_MAX);
    for (std::size_t k = 0; k < full_sources.size(); ++k) full_index[full_sources[k]] = k;
    parallel_for(full_sources.size(), threads, [&](std::size_t lo, std::size_t hi) {
      if (lo < hi)
        detail::hop_bounded_block(topo, rel.noisy_weights, full_sources.data() + lo, hi - lo, n - 1,
                                  full_mat.data() + lo * n);
    });
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (out.values[a * n + b] == kInf && comp[a] == comp[b])
          out.values[a * n + b] =
              std::min(full_mat[full_index[a] * n + b], full_mat[full_index[b] * n + a]);
  }

  for (std::size_t a = 0; a < n; ++a) {
    out.values[a * n + a] = 0.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      double est = out.values[a * n + b];
      if (est != kInf) est = std::max(est, 0.0);
      out.values[a * n + b] = est;
      out.values[b * n + a] = est;
    }
  }
  return out;
}

}  // namespace dpsp
