#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "accountant.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "unbounded.hpp"

namespace dpsp {

// --- ball peeling --------------------------------------------------------------

struct PeelStep {
  std::uint32_t center = 0;
  double radius = 0.0;                  // sampled exponential radius, not rounded
  std::vector<std::uint32_t> members;  // sorted; ball of `radius` hops around center
};

struct PeelTrace {
  std::size_t n = 0;
  double peel_radius_mean = 0.0;   // mean of the exponential radii (R)
  std::uint64_t ball_size_cap = 0;
  std::vector<PeelStep> steps;
  std::vector<std::uint32_t> survivors;  // sorted; vertices never peeled
};

// Repeatedly removes a ball around the smallest-id remaining vertex whose
// surroundings are sparse: a vertex qualifies while its ball of hop radius
// 100 * R * ln n within the remaining graph has at most ball_size_cap members.
// The sampled radius is NOT capped by the test radius, so a tail draw may
// remove a larger ball; that is accepted (the removal itself never depends on
// edge weights, only on the public topology). Stops when no vertex qualifies.
inline PeelTrace peel(const Topology& t, double peel_radius_mean, std::uint64_t ball_size_cap,
                      RandomStream& stream) {
  if (!(peel_radius_mean > 0.0)) throw std::invalid_argument("peel: radius mean must be positive");
  if (ball_size_cap < 1) throw std::invalid_argument("peel: ball size cap must be at least 1");
  validate(t);
  PeelTrace trace;
  trace.n = t.n;
  trace.peel_radius_mean = peel_radius_mean;
  trace.ball_size_cap = ball_size_cap;
  if (t.n == 0) return trace;
  Adjacency adj(t.n, t.edges);
  std::vector<std::uint8_t> alive(t.n, 1);
  const double test_radius = peel_hop_radius(peel_radius_mean, t.n);
  for (;;) {
    std::uint32_t pick = UINT32_MAX;
    for (std::uint32_t v = 0; v < t.n; ++v) {
      if (!alive[v]) continue;
      if (!detail::bounded_ball(adj, alive, v, test_radius, ball_size_cap).exceeded) {
        pick = v;
        break;
      }
    }
    if (pick == UINT32_MAX) break;
    PeelStep step;
    step.center = pick;
    step.radius = stream.expo(peel_radius_mean);
    step.members = detail::bounded_ball(adj, alive, pick, step.radius, t.n).members;
    for (std::uint32_t m : step.members) alive[m] = 0;
    trace.steps.push_back(std::move(step));
  }
  for (std::uint32_t v = 0; v < t.n; ++v)
    if (alive[v]) trace.survivors.push_back(v);
  return trace;
}

// Full replay check of a trace against its topology: every step's members are
// exactly the recorded ball in the graph with earlier balls removed, the
// center is the smallest qualifying vertex at its step, member sets are
// disjoint and together with survivors cover V, and no survivor still
// qualifies (termination certificate).
inline bool verify_peel_trace(const Topology& t, const PeelTrace& trace, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (trace.n != t.n) return fail("trace size does not match topology");
  if (t.n == 0) return trace.steps.empty() && trace.survivors.empty() ? true : fail("nonempty trace on empty graph");
  Adjacency adj(t.n, t.edges);
  const double test_radius = peel_hop_radius(trace.peel_radius_mean, t.n);
  std::vector<std::uint8_t> alive(t.n, 1);
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const PeelStep& step = trace.steps[s];
    if (step.center >= t.n || !alive[step.center])
      return fail("step " + std::to_string(s) + ": center invalid or already removed");
    for (std::uint32_t v = 0; v < step.center; ++v) {
      if (!alive[v]) continue;
      if (!detail::bounded_ball(adj, alive, v, test_radius, trace.ball_size_cap).exceeded)
        return fail("step " + std::to_string(s) + ": smaller-id vertex also qualified");
    }
    if (detail::bounded_ball(adj, alive, step.center, test_radius, trace.ball_size_cap).exceeded)
      return fail("step " + std::to_string(s) + ": center did not qualify");
    auto expected = detail::bounded_ball(adj, alive, step.center, step.radius, t.n).members;
    if (expected != step.members)
      return fail("step " + std::to_string(s) + ": members differ from replayed ball");
    for (std::uint32_t m : step.members) alive[m] = 0;  // disjointness: members were all alive
  }
  std::vector<std::uint32_t> rest;
  for (std::uint32_t v = 0; v < t.n; ++v)
    if (alive[v]) rest.push_back(v);
  if (rest != trace.survivors) return fail("survivors do not match unpeeled vertices");
  for (std::uint32_t v : trace.survivors)
    if (!detail::bounded_ball(adj, alive, v, test_radius, trace.ball_size_cap).exceeded)
      return fail("termination certificate violated: survivor " + std::to_string(v) + " qualifies");
  return true;
}

// --- path statistics over a trace ------------------------------------------------

struct ColorChangeStats {
  std::uint64_t path_hops = 0;      // Q: number of edges on the path
  std::uint64_t color_changes = 0;  // X: consecutive vertices in different balls
  std::uint64_t colored_count = 0;  // Y: path positions that were peeled
};

// Assigns color 1 + step index to peeled vertices (0 to survivors) and counts
// color changes along the given walk. The topology parameter exists to check
// the precondition that consecutive path vertices are adjacent.
inline ColorChangeStats color_change_stats(const PeelTrace& trace, const std::vector<std::uint32_t>& path,
                                           const Topology& t) {
  if (trace.n != t.n) throw std::invalid_argument("color_change_stats: trace does not match topology");
  if (path.empty()) throw std::invalid_argument("color_change_stats: empty path");
  std::unordered_set<std::uint64_t> edge_set;
  edge_set.reserve(t.edges.size() * 2);
  for (const auto& [u, v] : t.edges)
    edge_set.insert((static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v));
  std::vector<std::uint64_t> color(t.n, 0);
  for (std::size_t s = 0; s < trace.steps.size(); ++s)
    for (std::uint32_t m : trace.steps[s].members) color[m] = s + 1;
  ColorChangeStats stats;
  stats.path_hops = path.size() - 1;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= t.n) throw std::invalid_argument("color_change_stats: path vertex out of range");
    if (i + 1 < path.size()) {
      std::uint64_t key = (static_cast<std::uint64_t>(std::min(path[i], path[i + 1])) << 32) |
                          std::max(path[i], path[i + 1]);
      if (!edge_set.count(key)) throw std::invalid_argument("color_change_stats: path edge not in topology");
      if (color[path[i]] != color[path[i + 1]]) ++stats.color_changes;
    }
    if (color[path[i]] != 0) ++stats.colored_count;
  }
  return stats;
}

// --- colored multigraph and budgeted shortest paths ------------------------------

enum class EdgeColor { red, blue, green };

struct ColoredEdge {
  std::uint32_t u = 0, v = 0;
  double weight = 0.0;
  EdgeColor color = EdgeColor::red;
};

struct ColorBudgets {
  std::uint64_t max_red = 0;
  std::uint64_t max_blue = 1;
  std::uint64_t max_green = 0;
};

struct ColoredMultigraph {
  std::size_t n = 0;
  std::vector<ColoredEdge> edges;  // undirected; parallel edges allowed
  ColorBudgets budgets;
};

// Minimum total weight over walks from u to v that use at most the budgeted
// number of edges of each color; +inf if no such walk exists. Exact dynamic
// program over states (vertex, red used, green used, blue used), relaxed in
// rounds; correct for negative weights because all budgets are finite. Meant
// for moderate budgets (cross-checking); the release pipeline uses a
// collapsed realization instead.
inline double constrained_shortest_path(const ColoredMultigraph& mg, std::uint32_t u, std::uint32_t v) {
  if (u >= mg.n || v >= mg.n) throw std::invalid_argument("constrained_shortest_path: vertex out of range");
  for (const auto& e : mg.edges)
    if (e.u >= mg.n || e.v >= mg.n) throw std::invalid_argument("constrained_shortest_path: edge out of range");
  const std::uint64_t nr = mg.budgets.max_red + 1, ng = mg.budgets.max_green + 1,
                      nb = mg.budgets.max_blue + 1;
  const std::uint64_t per_vertex = nr * ng * nb;
  if (per_vertex > (std::uint64_t(1) << 40) / std::max<std::uint64_t>(mg.n, 1) || mg.n * per_vertex > 100'000'000)
    throw std::invalid_argument("constrained_shortest_path: state space too large for the exact solver");
  const std::size_t total = mg.n * per_vertex;
  auto idx = [&](std::uint32_t vert, std::uint64_t r, std::uint64_t g, std::uint64_t b) {
    return (static_cast<std::size_t>(vert) * nr + r) * ng * nb + g * nb + b;
  };
  std::vector<double> prev(total, kInf), cur;
  prev[idx(u, 0, 0, 0)] = 0.0;
  cur = prev;
  const std::uint64_t rounds = mg.budgets.max_red + mg.budgets.max_green + mg.budgets.max_blue;
  for (std::uint64_t round = 0; round < rounds; ++round) {
    bool changed = false;
    for (const auto& e : mg.edges) {
      std::uint64_t dr = e.color == EdgeColor::red, dg = e.color == EdgeColor::green,
                    db = e.color == EdgeColor::blue;
      for (std::uint64_t r = dr; r < nr; ++r)
        for (std::uint64_t g = dg; g < ng; ++g)
          for (std::uint64_t b = db; b < nb; ++b) {
            double da = prev[idx(e.u, r - dr, g - dg, b - db)] + e.weight;
            double& tb = cur[idx(e.v, r, g, b)];
            if (da < tb) { tb = da; changed = true; }
            double dbk = prev[idx(e.v, r - dr, g - dg, b - db)] + e.weight;
            double& ta = cur[idx(e.u, r, g, b)];
            if (dbk < ta) { ta = dbk; changed = true; }
          }
    }
    prev = cur;
    if (!changed) break;
  }
  double best = kInf;
  for (std::uint64_t s = 0; s < per_vertex; ++s) best = std::min(best, prev[static_cast<std::size_t>(v) * per_vertex + s]);
  return best;
}

namespace detail {

struct GreenEdge {
  std::uint32_t u = 0, v = 0;
  double weight = 0.0;
};

// All-sources minimum walk weights over red edges plus green shortcuts,
// tracking green usage exactly while the total round count realizes the red
// budget (each round appends at most one edge to any walk, so walks of at
// most max_red + max_green edges are covered; walks that spend more rounds
// on red edges than max_red alone are additionally admitted, which only
// lowers the reported minima — the documented collapsed realization).
// Output is row-major (n x n); row order matches vertex ids.
inline std::vector<double> red_green_walks(const Topology& t, const std::vector<double>& red_weights,
                                           const std::vector<GreenEdge>& green, const ColorBudgets& budgets,
                                           unsigned threads) {
  const std::size_t n = t.n;
  std::vector<double> dist(n * n, kInf);
  const std::uint64_t rounds = budgets.max_red + budgets.max_green;
  std::vector<std::uint32_t> sources(n);
  for (std::size_t i = 0; i < n; ++i) sources[i] = static_cast<std::uint32_t>(i);
  if (green.empty()) {
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
      if (lo < hi)
        hop_bounded_block(t, red_weights, sources.data() + lo, hi - lo, rounds, dist.data() + lo * n);
    });
    return dist;
  }
  const std::uint64_t ng = budgets.max_green + 1;
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> prev(n * ng), cur(n * ng);
    for (std::size_t src = lo; src < hi; ++src) {
      std::fill(cur.begin(), cur.end(), kInf);
      cur[src * ng] = 0.0;
      for (std::uint64_t round = 0; round < rounds; ++round) {
        std::copy(cur.begin(), cur.end(), prev.begin());
        for (std::size_t e = 0; e < t.edges.size(); ++e) {
          const auto [a, b] = t.edges[e];
          const double w = red_weights[e];
          for (std::uint64_t g = 0; g < ng; ++g) {
            double da = prev[a * ng + g] + w;
            if (da < cur[b * ng + g]) cur[b * ng + g] = da;
            double db = prev[b * ng + g] + w;
            if (db < cur[a * ng + g]) cur[a * ng + g] = db;
          }
        }
        for (const auto& ge : green) {
          for (std::uint64_t g = 0; g + 1 < ng; ++g) {
            double da = prev[ge.u * ng + g] + ge.weight;
            if (da < cur[ge.v * ng + g + 1]) cur[ge.v * ng + g + 1] = da;
            double db = prev[ge.v * ng + g] + ge.weight;
            if (db < cur[ge.u * ng + g + 1]) cur[ge.u * ng + g + 1] = db;
          }
        }
        if (std::memcmp(cur.data(), prev.data(), cur.size() * sizeof(double)) == 0) break;
      }
      double* row = dist.data() + src * n;
      for (std::size_t vtx = 0; vtx < n; ++vtx) {
        double best = kInf;
        for (std::uint64_t g = 0; g < ng; ++g) best = std::min(best, cur[vtx * ng + g]);
        row[vtx] = best;
      }
    }
  });
  return dist;
}

// One iteration's all-pairs estimates: the direct red/green walk, or a route
// through two hitting-set vertices joined by one blue value. Each of the
// three walk segments is granted the full red/green budget (a documented
// relaxation of the single shared budget; it only adds candidate walks).
inline DistanceMatrix budgeted_estimates(const Topology& t, const std::vector<double>& red_weights,
                                         const std::vector<GreenEdge>& green,
                                         const std::vector<std::uint32_t>& hitting_set,
                                         const std::vector<double>& blue, const ColorBudgets& budgets,
                                         unsigned threads) {
  const std::size_t n = t.n;
  const std::size_t l = hitting_set.size();
  std::vector<double> rg = red_green_walks(t, red_weights, green, budgets, threads);
  // through[x * l + j] = min over i of rg(x, s_i) + blue(i, j)
  std::vector<double> through(n * l, kInf);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t x = lo; x < hi; ++x) {
      const double* row = rg.data() + x * n;
      double* t_row = through.data() + x * l;
      for (std::size_t i = 0; i < l; ++i) {
        double base = row[hitting_set[i]];
        if (base == kInf) continue;
        const double* blue_row = blue.data() + i * l;
        for (std::size_t j = 0; j < l; ++j) t_row[j] = std::min(t_row[j], base + blue_row[j]);
      }
    }
  });
  DistanceMatrix out(n, 0.0);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> gather(l);
    for (std::size_t a = lo; a < hi; ++a) {
      const double* t_row = through.data() + a * l;
      for (std::size_t b = a + 1; b < n; ++b) {
        const double* row_b = rg.data() + b * n;
        double est = std::min(rg[a * n + b], row_b[a]);
        for (std::size_t j = 0; j < l; ++j) {
          double seg = row_b[hitting_set[j]];
          if (seg != kInf) est = std::min(est, t_row[j] + seg);
        }
        out.values[a * n + b] = est;
      }
    }
  });
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) out.values[b * n + a] = out.values[a * n + b];
  return out;
}

}  // namespace detail

// --- the recursive bounded-weight release -----------------------------------------

struct BoundedOptions {
  std::uint32_t k_override = 0;   // 0: derive the repetition count from n
  bool paper_constants = false;   // restore the reference repetition count
  bool zero_noise = false;        // debug: draw all noise at scale 0
  unsigned threads = 1;
  bool collect_traces = false;
};

struct TraceRecord {
  std::uint64_t depth = 0;
  std::uint64_t iteration = 0;  // 1-based outer iteration
  PeelTrace trace;
};

struct BoundedResult {
  DistanceMatrix estimates;
  BoundedParams params;      // top-level calibration
  PrivacyBudget requested;   // end-to-end budget
  double delta_param = 0.0;  // per-invocation delta after rescaling
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  BoundedAccounting accounting;
  std::vector<TraceRecord> traces;
};

namespace detail {

struct BoundedContext {
  Mode mode = Mode::approx;
  BoundedOptions options;
  std::uint64_t depth_limit = 0;
  std::vector<TraceRecord>* trace_sink = nullptr;
};

inline WeightedGraph induced_subgraph(const WeightedGraph& g, const std::vector<std::uint32_t>& members,
                                      std::vector<std::uint32_t>* local_of = nullptr) {
  WeightedGraph sub;
  sub.n = members.size();
  sub.weight_bound = g.weight_bound;
  std::vector<std::uint32_t> local(g.n, UINT32_MAX);
  for (std::uint32_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    if (local[u] != UINT32_MAX && local[v] != UINT32_MAX) {
      sub.edges.emplace_back(local[u], local[v]);
      sub.weights.push_back(g.weights[e]);
    }
  }
  if (local_of) *local_of = std::move(local);
  return sub;
}

// Entrywise median of k matrices; for even k the lower middle order statistic.
inline DistanceMatrix entrywise_median(std::vector<DistanceMatrix>& mats) {
  DistanceMatrix out(mats.front().n, 0.0);
  std::vector<double> vals(mats.size());
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    for (std::size_t k = 0; k < mats.size(); ++k) vals[k] = mats[k].values[c];
    auto mid = vals.begin() + (vals.size() - 1) / 2;
    std::nth_element(vals.begin(), mid, vals.end());
    out.values[c] = *mid;
  }
  return out;
}

inline void clamp_estimates(DistanceMatrix& m, double upper) {
  for (double& x : m.values)
    if (x != kInf) x = std::min(std::max(x, 0.0), upper);
  for (std::size_t i = 0; i < m.n; ++i) m.values[i * m.n + i] = 0.0;
}

struct CoreResult {
  DistanceMatrix estimates;
  BoundedAccounting accounting;
};

inline CoreResult bounded_core(const WeightedGraph& g, double eps, double delta, std::uint64_t depth,
                               const RandomStream& stream, const BoundedContext& ctx) {
  const std::size_t n = g.n;
  const double a_bound = *g.weight_bound;
  CoreResult res;
  res.accounting.n = n;
  res.accounting.mode = ctx.mode;
  res.accounting.eps_param = eps;
  res.accounting.delta_param = delta;
  if (n == 1) {  // nothing is released for a single vertex
    res.estimates = DistanceMatrix(1, 0.0);
    res.accounting.within_budget = true;
    return res;
  }
  BoundedParams params = calibrate_bounded(n, a_bound, PrivacyBudget{eps, delta}, ctx.mode,
                                           ctx.options.k_override, ctx.options.paper_constants);
  if (n <= params.recursion_floor || params.ball_size_cap >= n) {
    // Recursion cannot shrink the instance: release with the hitting-set
    // algorithm under the same budget and clamp into the bounded range.
    std::optional<UnboundedParams> overrides;
    if (ctx.options.zero_noise) overrides = zero_noise_params(n, PrivacyBudget{eps, delta}, ctx.mode);
    UnboundedRelease rel =
        release_unbounded(g, PrivacyBudget{eps, delta}, ctx.mode, stream.split(9001), overrides);
    res.estimates = reconstruct_all(rel, g.topology(), ctx.options.threads);
    clamp_estimates(res.estimates, static_cast<double>(n) * a_bound);
    res.accounting.fallback = true;
    res.accounting.fallback_audit = rel.accounting;
    res.accounting.total_epsilon = rel.accounting.total_epsilon;
    res.accounting.total_delta = rel.accounting.total_delta;
  } else {
    if (depth >= ctx.depth_limit)
      throw std::runtime_error("bounded_apsp: recursion depth limit exceeded (diagnostic guard)");
    const std::uint32_t k_count = params.iterations;
    res.accounting.iterations = k_count;
    const double red_scale = ctx.options.zero_noise ? 0.0 : params.red_scale;
    const double blue_scale = ctx.options.zero_noise ? 0.0 : params.blue_scale;
    Topology topo = g.topology();
    Adjacency adj(g.n, g.edges);
    ColorBudgets budgets{params.red_budget, 1, params.green_budget};
    std::vector<DistanceMatrix> iterations;
    iterations.reserve(k_count);
    for (std::uint32_t k = 1; k <= k_count; ++k) {
      RandomStream it_stream = stream.split(k);
      RandomStream peel_stream = it_stream.split(1);
      PeelTrace trace = peel(topo, params.peel_radius_mean, params.ball_size_cap, peel_stream);
      if (ctx.trace_sink) ctx.trace_sink->push_back(TraceRecord{depth, k, trace});

      std::vector<GreenEdge> green;
      PrivacyBudget iter_green_cost{0.0, 0.0};
      double kk = static_cast<double>(k_count);
      for (std::size_t t_idx = 0; t_idx < trace.steps.size(); ++t_idx) {
        const auto& members = trace.steps[t_idx].members;
        WeightedGraph ball_graph = induced_subgraph(g, members);
        RandomStream ball_stream = it_stream.split(1000 + t_idx);
        std::vector<DistanceMatrix> repeats;
        repeats.reserve(k_count);
        PrivacyBudget ball_cost{0.0, 0.0};
        for (std::uint32_t rep = 1; rep <= k_count; ++rep) {
          CoreResult child = bounded_core(ball_graph, eps / (3.0 * kk * kk), delta / (3.0 * kk * kk),
                                          depth + 1, ball_stream.split(rep), ctx);
          ball_cost.epsilon += child.accounting.total_epsilon;
          ball_cost.delta += child.accounting.total_delta;
          repeats.push_back(std::move(child.estimates));
          res.accounting.children.push_back(std::move(child.accounting));
        }
        DistanceMatrix ball_est = entrywise_median(repeats);
        for (std::size_t i = 0; i < members.size(); ++i)
          for (std::size_t j = i + 1; j < members.size(); ++j) {
            double w = ball_est.at(i, j);
            if (w != kInf) green.push_back(GreenEdge{members[i], members[j], w});
          }
        iter_green_cost.epsilon = std::max(iter_green_cost.epsilon, ball_cost.epsilon);
        iter_green_cost.delta = std::max(iter_green_cost.delta, ball_cost.delta);
      }

      RandomStream hs_stream = it_stream.split(2);
      std::vector<std::uint32_t> hitting_set =
          sample_without_replacement(n, params.hitting_set_size, hs_stream);
      const std::size_t l = hitting_set.size();

      RandomStream red_stream = it_stream.split(3);
      std::vector<double> red_weights(g.weights.size());
      for (std::size_t e = 0; e < g.weights.size(); ++e)
        red_weights[e] = g.weights[e] + red_stream.laplace(red_scale);

      RandomStream blue_stream = it_stream.split(4);
      std::vector<double> blue(l * l, 0.0);
      {
        std::vector<std::vector<double>> exact(l);
        for (std::size_t i = 0; i < l; ++i)
          exact[i] = dijkstra_from(topo, g.weights, hitting_set[i], &adj);
        for (std::size_t i = 0; i < l; ++i)
          for (std::size_t j = i + 1; j < l; ++j) {
            double noisy = exact[i][hitting_set[j]] + blue_stream.laplace(blue_scale);
            blue[i * l + j] = noisy;
            blue[j * l + i] = noisy;
          }
      }

      DistanceMatrix est = detail::budgeted_estimates(topo, red_weights, green, hitting_set, blue,
                                                      budgets, ctx.options.threads);
      clamp_estimates(est, static_cast<double>(n) * a_bound);
      iterations.push_back(std::move(est));

      double red_eps = red_scale > 0.0 ? 1.0 / red_scale : kInfCost;
      PrivacyBudget blue_cost =
          s_block_cost(l * (l - 1) / 2, blue_scale, ctx.mode, delta / (3.0 * kk));
      res.accounting.red_epsilon += red_eps;
      res.accounting.blue_epsilon += blue_cost.epsilon;
      res.accounting.blue_delta += blue_cost.delta;
      res.accounting.green_epsilon += iter_green_cost.epsilon;
      res.accounting.green_delta += iter_green_cost.delta;
    }
    res.estimates = entrywise_median(iterations);
    clamp_estimates(res.estimates, static_cast<double>(n) * a_bound);
    res.accounting.total_epsilon =
        res.accounting.red_epsilon + res.accounting.blue_epsilon + res.accounting.green_epsilon;
    res.accounting.total_delta = res.accounting.blue_delta + res.accounting.green_delta;
  }
  constexpr double slack = 1.0 + 1e-9;
  double delta_target = 3.0 * static_cast<double>(n) * static_cast<double>(n) * delta;
  res.accounting.within_budget = res.accounting.total_epsilon <= eps * slack &&
                                 res.accounting.total_delta <= std::max(delta, delta_target) * slack;
  return res;
}

}  // namespace detail

// Recursive private all-pairs release for graphs with a declared weight
// bound. Each of K iterations peels the topology into balls (handled by
// recursive releases whose per-pair medians become green shortcut edges),
// samples a hitting set whose exact pairwise distances are released with
// Laplace noise (blue values), perturbs every edge weight (red), and
// estimates every pair by the cheapest budgeted walk; the final output is the
// entrywise median across iterations, clamped into [0, n * A]. The requested
// delta is split per invocation via rescale_delta_for_bounded so the
// end-to-end guarantee matches the requested budget.
inline BoundedResult bounded_apsp(const WeightedGraph& g, const PrivacyBudget& budget, Mode mode,
                                  const RandomStream& stream, const BoundedOptions& options = {}) {
  validate(g);
  validate(budget);
  if (g.n == 0) throw std::invalid_argument("bounded_apsp: empty graph");
  if (!g.weight_bound) throw std::invalid_argument("bounded_apsp: graph has no weight bound");
  if (mode == Mode::approx && !(budget.delta > 0.0))
    throw std::invalid_argument("bounded_apsp: approx mode requires delta > 0");
  if (mode == Mode::pure && budget.delta != 0.0)
    throw std::invalid_argument("bounded_apsp: pure mode requires delta = 0");
  BoundedResult out;
  out.requested = budget;
  out.seed = stream.seed();
  out.stream_id = stream.stream_id();
  out.delta_param = rescale_delta_for_bounded(budget.delta, g.n);
  detail::BoundedContext ctx;
  ctx.mode = mode;
  ctx.options = options;
  double lg = std::log2(std::max<double>(static_cast<double>(g.n), 4.0));
  ctx.depth_limit = static_cast<std::uint64_t>(10.0 * std::log2(lg) + 5.0);
  if (options.collect_traces) ctx.trace_sink = &out.traces;
  if (g.n > 1)
    out.params = calibrate_bounded(g.n, *g.weight_bound, PrivacyBudget{budget.epsilon, out.delta_param},
                                   mode, options.k_override, options.paper_constants);
  detail::CoreResult core = detail::bounded_core(g, budget.epsilon, out.delta_param, 0, stream, ctx);
  out.estimates = std::move(core.estimates);
  out.accounting = std::move(core.accounting);
  return out;
}

}  // namespace dpsp
