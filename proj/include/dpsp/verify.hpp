#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bounded.hpp"
#include "graph.hpp"
#include "harness.hpp"
#include "random.hpp"

namespace dpsp {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace verifydetail {

// Minimum walk weight under per-color edge budgets by exhaustive walk
// enumeration; only usable on tiny instances.
inline void brute_walks(const ColoredMultigraph& mg, std::uint32_t at, std::uint32_t target,
                        std::uint64_t red_left, std::uint64_t green_left, std::uint64_t blue_left,
                        double acc, double& best) {
  if (at == target) best = std::min(best, acc);
  for (const auto& e : mg.edges) {
    std::uint32_t other;
    if (e.u == at) other = e.v;
    else if (e.v == at) other = e.u;
    else continue;
    std::uint64_t r = red_left, g = green_left, b = blue_left;
    if (e.color == EdgeColor::red) { if (!r) continue; --r; }
    if (e.color == EdgeColor::green) { if (!g) continue; --g; }
    if (e.color == EdgeColor::blue) { if (!b) continue; --b; }
    brute_walks(mg, other, target, r, g, b, acc + e.weight, best);
  }
}

inline double brute_constrained(const ColoredMultigraph& mg, std::uint32_t u, std::uint32_t v) {
  double best = kInf;
  brute_walks(mg, u, v, mg.budgets.max_red, mg.budgets.max_green, mg.budgets.max_blue, 0.0, best);
  return best;
}

// Exhaustively perturbs edge weights within an l1 ball of radius 1 and checks
// that every exact pairwise distance moves by at most the l1 weight change —
// the sensitivity bound behind every noise scale in the release paths.
inline VerifyCheck check_distance_sensitivity() {
  VerifyCheck check{"distance-sensitivity-exhaustion", true, ""};
  RandomStream stream(411);
  std::vector<WeightedGraph> graphs;
  graphs.push_back(generate({GraphKind::path, 7}, WeightLaw::uniform(0.5, 3.0), stream.split(1)));
  graphs.push_back(generate({GraphKind::cycle, 6}, WeightLaw::uniform(1.0, 2.0), stream.split(2)));
  graphs.push_back(generate({GraphKind::grid, 0, 3, 3}, WeightLaw::uniform(0.5, 2.0), stream.split(3)));
  graphs.push_back(generate({GraphKind::erdos_renyi, 8, 0, 0, 0.5}, WeightLaw::uniform(0.5, 2.0), stream.split(4)));
  constexpr double kTol = 1e-9;
  std::uint64_t cases = 0;
  for (auto& g : graphs) {
    g.weight_bound.reset();  // perturbations below may exceed the generator's bound
    DistanceMatrix base = exact_apsp(g);
    auto check_variant = [&](WeightedGraph& variant, double l1) {
      for (double w : variant.weights)
        if (w < 0.0) return;  // not a valid weighting; skip
      DistanceMatrix moved = exact_apsp(variant);
      ++cases;
      for (std::size_t i = 0; i < base.values.size(); ++i) {
        double a = base.values[i], b = moved.values[i];
        if (a == kInf || b == kInf) {
          if (a != b) {
            check.passed = false;
            check.detail = "connectivity changed under weight perturbation";
          }
          continue;
        }
        if (std::abs(a - b) > l1 + kTol) {
          check.passed = false;
          std::ostringstream os;
          os << "distance moved by " << std::abs(a - b) << " under an l1 weight change of " << l1;
          check.detail = os.str();
        }
      }
    };
    const double single[] = {1.0, -1.0, 0.37, -0.37};
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      for (double d : single) {
        WeightedGraph variant = g;
        variant.weights[e] += d;
        check_variant(variant, std::abs(d));
      }
    // split the unit l1 budget across two edges, opposite signs
    for (std::size_t e = 0; e + 1 < g.edges.size(); ++e) {
      WeightedGraph variant = g;
      variant.weights[e] += 0.5;
      variant.weights[e + 1] -= 0.5;
      check_variant(variant, 1.0);
    }
  }
  if (check.passed) {
    std::ostringstream os;
    os << cases << " perturbed weightings, all pairwise distances within the l1 bound";
    check.detail = os.str();
  }
  return check;
}

inline VerifyCheck check_sampler_statistics() {
  VerifyCheck check{"sampler-statistics", true, ""};
  std::ostringstream os;
  RandomStream stream(20240917);
  constexpr std::size_t kDraws = 1'000'000;
  double u_sum = 0.0, u_min = 1.0, u_max = 0.0;
  RandomStream us = stream.split(1);
  for (std::size_t i = 0; i < kDraws; ++i) {
    double u = us.uniform01();
    u_sum += u;
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }
  double u_mean = u_sum / kDraws;
  if (!(u_min > 0.0 && u_max < 1.0)) { check.passed = false; os << "uniform left (0,1); "; }
  if (std::abs(u_mean - 0.5) > 0.002) { check.passed = false; os << "uniform mean " << u_mean << "; "; }

  RandomStream ls = stream.split(2);
  const double b = 2.5;
  double l_sum = 0.0;
  std::size_t l_above = 0;  // |x| > b ln 2 has probability 1/2
  const double l_med = b * std::log(2.0);
  for (std::size_t i = 0; i < kDraws; ++i) {
    double x = ls.laplace(b);
    l_sum += x;
    if (std::abs(x) > l_med) ++l_above;
  }
  double l_mean = l_sum / kDraws;
  double l_frac = static_cast<double>(l_above) / kDraws;
  if (std::abs(l_mean) > 5.0 * b * std::sqrt(2.0 / kDraws)) { check.passed = false; os << "laplace mean " << l_mean << "; "; }
  if (std::abs(l_frac - 0.5) > 0.003) { check.passed = false; os << "laplace spread " << l_frac << "; "; }

  RandomStream es = stream.split(3);
  const double mean = 4.0;
  double e_sum = 0.0;
  std::size_t e_neg = 0, e_tail = 0;  // P(X > 5 mean) = e^-5
  for (std::size_t i = 0; i < kDraws; ++i) {
    double x = es.expo(mean);
    e_sum += x;
    if (x < 0.0) ++e_neg;
    if (x > 5.0 * mean) ++e_tail;
  }
  double e_mean = e_sum / kDraws;
  double e_frac = static_cast<double>(e_tail) / kDraws;
  if (e_neg != 0) { check.passed = false; os << "negative exponential draw; "; }
  if (std::abs(e_mean - mean) > 0.02 * mean) { check.passed = false; os << "exponential mean " << e_mean << "; "; }
  if (std::abs(e_frac - std::exp(-5.0)) > 0.0005 + 5.0 * std::sqrt(std::exp(-5.0) / kDraws)) {
    check.passed = false;
    os << "exponential tail " << e_frac << "; ";
  }
  if (check.passed) {
    os << "uniform mean " << u_mean << ", laplace spread " << l_frac << ", exponential tail " << e_frac;
  }
  check.detail = os.str();
  return check;
}

inline VerifyCheck check_peel_partition() {
  VerifyCheck check{"peel-partition-replay", true, ""};
  RandomStream stream(733);
  struct Case { GraphSpec spec; double radius; std::uint64_t cap; };
  std::vector<Case> cases = {
      {{GraphKind::path, 240}, 2.0, 120},
      {{GraphKind::grid, 0, 12, 12}, 1.0, 60},
      {{GraphKind::erdos_renyi, 60, 0, 0, 0.05}, 1.0, 20},
      {{GraphKind::star, 50}, 1.5, 10},
  };
  std::size_t total_steps = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    WeightedGraph g = generate(cases[c].spec, WeightLaw::constant(1.0), stream.split(100 + c));
    RandomStream peel_stream = stream.split(200 + c);
    PeelTrace trace = peel(g.topology(), cases[c].radius, cases[c].cap, peel_stream);
    std::string why;
    if (!verify_peel_trace(g.topology(), trace, &why)) {
      check.passed = false;
      check.detail = to_string(cases[c].spec.kind) + ": " + why;
      return check;
    }
    total_steps += trace.steps.size();
  }
  std::ostringstream os;
  os << cases.size() << " topologies replayed, " << total_steps << " peel steps verified";
  check.detail = os.str();
  return check;
}

inline VerifyCheck check_constrained_walks() {
  VerifyCheck check{"budgeted-walk-equivalence", true, ""};
  RandomStream stream(9320);
  constexpr int kTrials = 60;
  std::size_t compared = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    RandomStream ts = stream.split(trial + 1);
    ColoredMultigraph mg;
    mg.n = 3 + ts.uniform_below(4);  // 3..6 vertices
    std::size_t m = 4 + ts.uniform_below(6);
    for (std::size_t e = 0; e < m; ++e) {
      ColoredEdge edge;
      edge.u = static_cast<std::uint32_t>(ts.uniform_below(mg.n));
      edge.v = static_cast<std::uint32_t>(ts.uniform_below(mg.n));
      if (edge.u == edge.v) continue;
      double roll = ts.uniform01();
      edge.color = roll < 0.5 ? EdgeColor::red : (roll < 0.8 ? EdgeColor::green : EdgeColor::blue);
      edge.weight = ts.uniform01() * 4.0 - 1.0;  // negative weights allowed
      mg.edges.push_back(edge);
    }
    mg.budgets.max_red = 1 + ts.uniform_below(3);
    mg.budgets.max_green = ts.uniform_below(3);
    mg.budgets.max_blue = ts.uniform_below(2);
    for (std::uint32_t u = 0; u < mg.n; ++u)
      for (std::uint32_t v = 0; v < mg.n; ++v) {
        double got = constrained_shortest_path(mg, u, v);
        double want = brute_constrained(mg, u, v);
        ++compared;
        bool ok = (got == kInf && want == kInf) || std::abs(got - want) <= 1e-9;
        if (!ok) {
          check.passed = false;
          std::ostringstream os;
          os << "trial " << trial << " pair (" << u << "," << v << "): solver " << got
             << " vs enumeration " << want;
          check.detail = os.str();
          return check;
        }
      }
  }
  std::ostringstream os;
  os << compared << " vertex pairs matched exhaustive walk enumeration";
  check.detail = os.str();
  return check;
}

}  // namespace verifydetail

// The self-check suite behind `dpsp verify`: distance sensitivity under
// exhaustive unit-l1 weight perturbations, sampler statistics on a million
// draws, peel-trace replay on several topologies, and budgeted-walk solver
// equivalence against exhaustive enumeration.
inline std::vector<VerifyCheck> run_verification() {
  return {
      verifydetail::check_distance_sensitivity(),
      verifydetail::check_sampler_statistics(),
      verifydetail::check_peel_partition(),
      verifydetail::check_constrained_walks(),
  };
}

}  // namespace dpsp
