#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accountant.hpp"
#include "bounded.hpp"
#include "graph.hpp"
#include "random.hpp"
#include "unbounded.hpp"

namespace dpsp {

// --- graph generators --------------------------------------------------------

enum class GraphKind { path, cycle, grid, erdos_renyi, star };

inline std::string to_string(GraphKind k) {
  switch (k) {
    case GraphKind::path: return "path";
    case GraphKind::cycle: return "cycle";
    case GraphKind::grid: return "grid";
    case GraphKind::erdos_renyi: return "erdos_renyi";
    case GraphKind::star: return "star";
  }
  throw std::logic_error("unknown graph kind");
}

struct GraphSpec {
  GraphKind kind = GraphKind::path;
  std::size_t n = 0;                // path, cycle, star, erdos_renyi
  std::size_t rows = 0, cols = 0;   // grid (n = rows * cols)
  double edge_probability = 0.0;    // erdos_renyi

  std::size_t vertex_count() const { return kind == GraphKind::grid ? rows * cols : n; }
};

// Edge-weight law. `uniform` draws from the half-open interval (lo, hi];
// `constant` always yields lo. supremum() is the declared weight bound.
struct WeightLaw {
  enum class Kind { constant, uniform } kind = Kind::constant;
  double lo = 1.0, hi = 1.0;

  static WeightLaw constant(double value) { return WeightLaw{Kind::constant, value, value}; }
  static WeightLaw uniform(double lo, double hi) { return WeightLaw{Kind::uniform, lo, hi}; }

  double supremum() const { return kind == Kind::constant ? lo : hi; }
  double sample(RandomStream& stream) const {
    if (kind == Kind::constant) return lo;
    return hi - (hi - lo) * stream.uniform01();
  }
};

// Deterministic generator: topology randomness (only Erdos-Renyi uses any)
// comes from stream.split(1), weights from stream.split(2) in edge order.
inline WeightedGraph generate(const GraphSpec& spec, const WeightLaw& law, const RandomStream& stream) {
  if (!(law.supremum() > 0.0) || law.lo < 0.0 || law.hi < law.lo)
    throw std::invalid_argument("generate: weight law must cover positive values");
  WeightedGraph g;
  g.n = spec.vertex_count();
  if (g.n == 0) throw std::invalid_argument("generate: empty graph");
  g.weight_bound = law.supremum();
  RandomStream topo_stream = stream.split(1);
  switch (spec.kind) {
    case GraphKind::path:
      for (std::uint32_t i = 0; i + 1 < g.n; ++i) g.edges.emplace_back(i, i + 1);
      break;
    case GraphKind::cycle:
      if (g.n < 3) throw std::invalid_argument("generate: cycle needs at least 3 vertices");
      for (std::uint32_t i = 0; i + 1 < g.n; ++i) g.edges.emplace_back(i, i + 1);
      g.edges.emplace_back(static_cast<std::uint32_t>(g.n - 1), 0);
      break;
    case GraphKind::grid: {
      if (spec.rows == 0 || spec.cols == 0) throw std::invalid_argument("generate: grid needs rows and cols");
      auto id = [&](std::size_t r, std::size_t c) { return static_cast<std::uint32_t>(r * spec.cols + c); };
      for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c) {
          if (c + 1 < spec.cols) g.edges.emplace_back(id(r, c), id(r, c + 1));
          if (r + 1 < spec.rows) g.edges.emplace_back(id(r, c), id(r + 1, c));
        }
      break;
    }
    case GraphKind::erdos_renyi: {
      if (spec.edge_probability < 0.0 || spec.edge_probability > 1.0)
        throw std::invalid_argument("generate: edge probability must lie in [0, 1]");
      for (std::uint32_t i = 0; i < g.n; ++i)
        for (std::uint32_t j = i + 1; j < g.n; ++j)
          if (topo_stream.uniform01() < spec.edge_probability) g.edges.emplace_back(i, j);
      break;
    }
    case GraphKind::star:
      if (g.n < 2) throw std::invalid_argument("generate: star needs at least 2 vertices");
      for (std::uint32_t i = 1; i < g.n; ++i) g.edges.emplace_back(0, i);
      break;
  }
  RandomStream weight_stream = stream.split(2);
  g.weights.reserve(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) g.weights.push_back(law.sample(weight_stream));
  validate(g);
  return g;
}

// --- error evaluation ---------------------------------------------------------

struct ErrorReport {
  std::size_t n = 0;
  std::uint64_t compared_pairs = 0;      // unordered pairs with a finite true distance
  std::uint64_t disconnected_pairs = 0;  // unordered pairs with infinite true distance
  std::uint64_t spurious_finite = 0;     // estimate finite where the truth is infinite
  double max_err = 0.0;
  double mean_err = 0.0;
  double median_err = 0.0;
  double p90_err = 0.0;
  double p99_err = 0.0;
  double predicted = 0.0;   // theory-shaped bound, when the producing run knows it
  double runtime_ms = 0.0;  // release + reconstruction time, when measured
};

namespace detail {
// Nearest-rank quantile of a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  rank = std::min(std::max<std::size_t>(rank, 1), sorted.size());
  return sorted[rank - 1];
}
}  // namespace detail

// Absolute error statistics of `estimate` against `truth` over unordered
// pairs whose true distance is finite; an infinite estimate for such a pair
// makes max/mean infinite. Pairs with infinite truth are only counted.
inline ErrorReport evaluate(const DistanceMatrix& estimate, const DistanceMatrix& truth) {
  if (estimate.n != truth.n) throw std::invalid_argument("evaluate: size mismatch");
  ErrorReport rep;
  rep.n = truth.n;
  std::vector<double> errs;
  errs.reserve(truth.n * (truth.n - 1) / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.n; ++i)
    for (std::size_t j = i + 1; j < truth.n; ++j) {
      double t = truth.at(i, j), e = estimate.at(i, j);
      if (t == kInf) {
        ++rep.disconnected_pairs;
        if (e != kInf) ++rep.spurious_finite;
        continue;
      }
      double err = e == kInf ? kInf : std::abs(e - t);
      errs.push_back(err);
      sum += err;
      rep.max_err = std::max(rep.max_err, err);
    }
  rep.compared_pairs = errs.size();
  if (!errs.empty()) {
    rep.mean_err = sum / static_cast<double>(errs.size());
    std::sort(errs.begin(), errs.end());
    rep.median_err = detail::quantile_sorted(errs, 0.5);
    rep.p90_err = detail::quantile_sorted(errs, 0.9);
    rep.p99_err = detail::quantile_sorted(errs, 0.99);
  }
  return rep;
}

// --- scaling-law fit ------------------------------------------------------------

struct ScalingFit {
  double slope = 0.0;      // exponent in err ~ n^slope
  double intercept = 0.0;  // natural-log intercept
};

// Ordinary least squares of ln(err) on ln(n). Needs at least four points and
// strictly positive coordinates; callers feed one aggregated error per size.
inline ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw std::invalid_argument("scaling_fit: need at least 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, err] : points) {
    if (!(n > 0.0) || !(err > 0.0) || err == kInf)
      throw std::invalid_argument("scaling_fit: points must have positive finite coordinates");
    double x = std::log(n), y = std::log(err);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  double m = static_cast<double>(points.size());
  double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("scaling_fit: points share one size");
  ScalingFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

// --- experiment sweeps -----------------------------------------------------------

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::unbounded;
  Mode mode = Mode::approx;
  PrivacyBudget budget;
  GraphSpec graph;
  WeightLaw weights = WeightLaw::uniform(0.0, 1.0);
  std::vector<std::uint64_t> seeds;
  unsigned threads = 1;
  BoundedOptions bounded_options;  // threads field is overridden by `threads`
};

struct SweepRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::unbounded;
  Mode mode = Mode::approx;
  double epsilon = 0.0, delta = 0.0;
  double weight_bound = 0.0;  // the A column
  double max_err = 0.0, mean_err = 0.0;
  double predicted = 0.0;
  double runtime_ms = 0.0;
};

// One release + evaluation per seed. Per seed, the graph is drawn from
// RandomStream(seed).split(1) and the release consumes .split(2), so rows are
// reproducible in isolation. runtime_ms covers release plus reconstruction.
inline std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw std::invalid_argument("run_sweep: no seeds");
  std::vector<SweepRow> rows;
  rows.reserve(spec.seeds.size());
  for (std::uint64_t seed : spec.seeds) {
    RandomStream stream(seed);
    WeightedGraph g = generate(spec.graph, spec.weights, stream.split(1));
    DistanceMatrix truth = exact_apsp(g);
    SweepRow row;
    row.n = g.n;
    row.seed = seed;
    row.algorithm = spec.algorithm;
    row.mode = spec.mode;
    row.epsilon = spec.budget.epsilon;
    row.delta = spec.budget.delta;
    row.weight_bound = *g.weight_bound;
    row.predicted = predict_error_bound(g.n, g.weight_bound, spec.budget, spec.algorithm, spec.mode);
    auto started = std::chrono::steady_clock::now();
    DistanceMatrix est;
    if (spec.algorithm == Algorithm::unbounded) {
      UnboundedRelease rel = release_unbounded(g, spec.budget, spec.mode, stream.split(2));
      est = reconstruct_all(rel, g.topology(), spec.threads);
    } else {
      BoundedOptions opts = spec.bounded_options;
      opts.threads = spec.threads;
      est = bounded_apsp(g, spec.budget, spec.mode, stream.split(2), opts).estimates;
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    ErrorReport rep = evaluate(est, truth);
    rep.predicted = row.predicted;
    rep.runtime_ms = row.runtime_ms;
    row.max_err = rep.max_err;
    row.mean_err = rep.mean_err;
    rows.push_back(row);
  }
  return rows;
}

// CSV with a fixed header; doubles carry 17 significant digits so files are
// stable across runs and platforms.
inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "n,seed,algorithm,mode,epsilon,delta,A,max_err,mean_err,predicted,runtime_ms\n";
  out << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.n << ',' << r.seed << ',' << to_string(r.algorithm) << ',' << to_string(r.mode) << ','
        << r.epsilon << ',' << r.delta << ',' << r.weight_bound << ',' << r.max_err << ','
        << r.mean_err << ',' << r.predicted << ',' << r.runtime_ms << '\n';
  }
}

}  // namespace dpsp
