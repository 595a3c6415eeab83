#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpsp {

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

enum class Mode { pure, approx };

inline std::string to_string(Mode m) { return m == Mode::pure ? "pure" : "approx"; }

inline Mode mode_from_string(const std::string& s) {
  if (s == "pure") return Mode::pure;
  if (s == "approx") return Mode::approx;
  throw std::invalid_argument("unknown mode: " + s);
}

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

inline void validate(const PrivacyBudget& b) {
  if (!(b.epsilon > 0.0) || b.epsilon > 1.0)
    throw std::invalid_argument("budget: epsilon must lie in (0, 1]");
  if (!(b.delta >= 0.0) || b.delta > 0.1)
    throw std::invalid_argument("budget: delta must lie in [0, 1/10]");
}

// Sequential composition: budgets add componentwise.
inline PrivacyBudget basic_compose(const std::vector<PrivacyBudget>& parts) {
  PrivacyBudget total;
  for (const auto& p : parts) {
    if (p.epsilon < 0.0 || p.delta < 0.0) throw std::invalid_argument("basic_compose: negative component");
    total.epsilon += p.epsilon;
    total.delta += p.delta;
  }
  return total;
}

// Strong composition for k releases of an (eps, delta) mechanism with slack
// delta_prime: (sqrt(2k ln(1/delta_prime)) eps + k eps (e^eps - 1), k delta + delta_prime).
inline PrivacyBudget strong_compose(std::uint64_t k, PrivacyBudget per_release, double delta_prime) {
  if (k == 0) throw std::invalid_argument("strong_compose: k must be positive");
  if (per_release.epsilon < 0.0 || per_release.delta < 0.0)
    throw std::invalid_argument("strong_compose: negative per-release budget");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw std::invalid_argument("strong_compose: delta_prime must lie in (0, 1)");
  double e = per_release.epsilon;
  double kd = static_cast<double>(k);
  PrivacyBudget out;
  out.epsilon = std::sqrt(2.0 * kd * std::log(1.0 / delta_prime)) * e + kd * e * std::expm1(e);
  out.delta = kd * per_release.delta + delta_prime;
  return out;
}

inline PrivacyBudget strong_compose(std::uint64_t k, double eps, double delta, double delta_prime) {
  return strong_compose(k, PrivacyBudget{eps, delta}, delta_prime);
}

// --- hitting-set algorithm parameters ----------------------------------------

struct UnboundedParams {
  Mode mode = Mode::approx;
  std::uint64_t hitting_set_size = 0;   // L, clamped to [1, n]
  double noise_scale_s = 0.0;           // Laplace scale on hitting-set pair distances
  double edge_noise_scale = 0.0;        // Laplace scale on edge weights
  std::uint64_t hop_radius = 0;         // R, clamped to [1, max(1, n-1)]
  double c_l = 1.0;
  double c_t = 1.0;
};

// Cost of releasing the hitting-set distance block: `pairs` Laplace draws at
// `scale` with sensitivity 1 each, composed basic (pure) or strong (approx).
inline PrivacyBudget s_block_cost(std::uint64_t pairs, double scale, Mode mode, double delta) {
  if (pairs == 0) return {0.0, 0.0};
  if (!(scale > 0.0)) return {kInfCost, mode == Mode::approx ? delta : 0.0};
  if (mode == Mode::pure) return {static_cast<double>(pairs) / scale, 0.0};
  return strong_compose(pairs, {1.0 / scale, 0.0}, delta);
}

struct UnboundedAccounting {
  double edge_epsilon = 0.0;       // whole noisy weight vector, l1 sensitivity 1
  std::uint64_t s_pairs = 0;       // unordered hitting-set pairs actually drawn
  double s_epsilon = 0.0;
  double s_delta = 0.0;
  double total_epsilon = 0.0;
  double total_delta = 0.0;
  bool within_budget = false;
};

inline UnboundedAccounting audit_unbounded(const UnboundedParams& p, const PrivacyBudget& budget) {
  UnboundedAccounting a;
  a.edge_epsilon = p.edge_noise_scale > 0.0 ? 1.0 / p.edge_noise_scale : kInfCost;
  a.s_pairs = p.hitting_set_size * (p.hitting_set_size - 1) / 2;
  PrivacyBudget s = s_block_cost(a.s_pairs, p.noise_scale_s, p.mode, budget.delta);
  a.s_epsilon = s.epsilon;
  a.s_delta = s.delta;
  a.total_epsilon = a.edge_epsilon + a.s_epsilon;
  a.total_delta = a.s_delta;
  constexpr double slack = 1.0 + 1e-12;
  a.within_budget = a.total_epsilon <= budget.epsilon * slack && a.total_delta <= budget.delta * slack;
  return a;
}

namespace detail {

// Smallest scale whose s-block cost stays within eps_half, by bisection on
// the per-release epsilon (the cost is monotone in it).
inline double min_s_scale(std::uint64_t pairs, Mode mode, double delta, double eps_half) {
  if (pairs == 0 || eps_half <= 0.0) return 0.0;
  if (mode == Mode::pure) return static_cast<double>(pairs) / eps_half;
  double lo = 0.0, hi = eps_half;  // per-release epsilon bracket
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (strong_compose(pairs, {mid, 0.0}, delta).epsilon <= eps_half) lo = mid;
    else hi = mid;
  }
  return lo > 0.0 ? 1.0 / lo : kInfCost;
}

}  // namespace detail

// Parameters for the hitting-set release on n vertices. The closed forms set
// the defaults; the audit floor below guarantees the release never exceeds
// budget even for adversarial c_t, by never letting the scale drop beneath
// the smallest value whose recomputed composition cost fits in epsilon/2.
inline UnboundedParams calibrate_unbounded(std::uint64_t n, const PrivacyBudget& budget, Mode mode,
                                           double c_l = 1.0, double c_t = 1.0) {
  validate(budget);
  if (n == 0) throw std::invalid_argument("calibrate_unbounded: empty graph");
  if (mode == Mode::approx && !(budget.delta > 0.0))
    throw std::invalid_argument("calibrate_unbounded: approx mode requires delta > 0");
  if (mode == Mode::pure && budget.delta != 0.0)
    throw std::invalid_argument("calibrate_unbounded: pure mode requires delta == 0");
  if (!(c_l > 0.0) || !(c_t > 0.0))
    throw std::invalid_argument("calibrate_unbounded: constants must be positive");
  UnboundedParams p;
  p.mode = mode;
  p.c_l = c_l;
  p.c_t = c_t;
  double nd = static_cast<double>(n);
  double ln_n = std::log(nd);
  double raw_l = mode == Mode::approx ? c_l * std::sqrt(nd) * ln_n : c_l * std::cbrt(nd) * ln_n;
  p.hitting_set_size = std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw_l))));
  p.edge_noise_scale = 2.0 / budget.epsilon;
  double l = static_cast<double>(p.hitting_set_size);
  double formula = mode == Mode::approx
                       ? c_t * l * std::sqrt(2.0 * std::log(1.0 / budget.delta)) * (2.0 / budget.epsilon)
                       : c_t * 2.0 * l * l / budget.epsilon;
  std::uint64_t pairs = p.hitting_set_size * (p.hitting_set_size - 1) / 2;
  double floor_scale = detail::min_s_scale(pairs, mode, budget.delta, budget.epsilon / 2.0);
  p.noise_scale_s = std::max(formula, floor_scale);
  double raw_r = std::ceil(10.0 * nd * ln_n / l);
  p.hop_radius = static_cast<std::uint64_t>(std::max(1.0, std::min(nd - 1.0, raw_r)));
  return p;
}

inline void validate(const UnboundedParams& p, std::uint64_t n) {
  if (p.hitting_set_size < 1 || p.hitting_set_size > n)
    throw std::invalid_argument("params: hitting set size must lie in [1, n]");
  if (p.hop_radius < 1) throw std::invalid_argument("params: hop radius must be at least 1");
  if (p.noise_scale_s < 0.0 || p.edge_noise_scale < 0.0)
    throw std::invalid_argument("params: negative noise scale");
}

// --- peeling algorithm parameters ---------------------------------------------

struct BoundedParams {
  Mode mode = Mode::approx;
  std::uint32_t iterations = 0;        // K
  double ball_size_cap_raw = 0.0;      // T before rounding
  std::uint64_t ball_size_cap = 0;     // T, rounded up, at least 1
  double peel_radius_mean = 0.0;       // R (mean of the exponential peel radii)
  std::uint64_t hitting_set_size = 0;  // L, clamped to [1, n]
  double red_scale = 0.0;
  double blue_scale = 0.0;
  std::uint64_t red_budget = 0;        // per-walk red edge budget
  std::uint64_t blue_budget = 1;
  std::uint64_t green_budget = 0;
  std::uint64_t recursion_floor = 2;
  bool paper_constants = false;
};

// Hop radius of the small-ball test during peeling: 100 * R * ln n.
inline double peel_hop_radius(double peel_radius_mean, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("peel_hop_radius: empty graph");
  return 100.0 * peel_radius_mean * std::log(static_cast<double>(n));
}

inline std::uint32_t default_iteration_count(std::uint64_t n, bool paper_constants) {
  double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(n, 2)));
  if (paper_constants) return static_cast<std::uint32_t>(std::ceil(100.0 * ln_n));
  auto k = static_cast<std::uint32_t>(std::max(3.0, std::ceil(ln_n)));
  if (k % 2 == 0) ++k;
  return k;
}

// Parameters for the recursive peeling algorithm. delta here is the
// per-invocation parameter (already rescaled by the caller for the end-to-end
// target). Budgets follow the reference shapes with the leading constant scaled
// consistently with the K actually used (the reference K is 100 ln n).
inline BoundedParams calibrate_bounded(std::uint64_t n, double weight_bound, const PrivacyBudget& budget,
                                       Mode mode, std::uint32_t k_override = 0,
                                       bool paper_constants = false) {
  if (n == 0) throw std::invalid_argument("calibrate_bounded: empty graph");
  if (!(weight_bound > 0.0)) throw std::invalid_argument("calibrate_bounded: weight bound must be positive");
  if (!(budget.epsilon > 0.0)) throw std::invalid_argument("calibrate_bounded: epsilon must be positive");
  if (mode == Mode::approx && !(budget.delta > 0.0))
    throw std::invalid_argument("calibrate_bounded: approx mode requires delta > 0");
  BoundedParams p;
  p.mode = mode;
  p.paper_constants = paper_constants;
  p.iterations = k_override ? k_override : default_iteration_count(n, paper_constants);
  double nd = static_cast<double>(n);
  double ln_n = std::log(std::max(nd, 2.0));
  double a_eff = std::max(weight_bound, 1.0 / budget.epsilon);
  double x = a_eff * budget.epsilon * nd;  // >= n since a_eff * eps >= 1
  constexpr double kSqrt2 = 1.4142135623730951;
  constexpr double kSqrt17 = 4.123105625617661;
  double t_exp = mode == Mode::approx ? (kSqrt2 - 1.0) : (kSqrt17 - 3.0) / 4.0;
  double r_exp = mode == Mode::approx ? (2.0 - kSqrt2) : (5.0 - kSqrt17) / 2.0;
  p.ball_size_cap_raw = nd / std::pow(x, t_exp);
  p.ball_size_cap = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(p.ball_size_cap_raw)));
  p.peel_radius_mean = nd / std::pow(x, r_exp);
  double cap = static_cast<double>(p.ball_size_cap);
  p.hitting_set_size =
      std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(100.0 * ln_n * nd / cap))));
  double k = static_cast<double>(p.iterations);
  double l = static_cast<double>(p.hitting_set_size);
  p.red_scale = 3.0 * k / budget.epsilon;
  p.blue_scale = mode == Mode::approx
                     ? 10.0 * k * l * std::sqrt(std::log(3.0 * k / budget.delta)) / budget.epsilon
                     : 10.0 * k * l * l / budget.epsilon;
  p.green_budget = static_cast<std::uint64_t>(std::ceil(k * cap / (p.peel_radius_mean * ln_n)));
  p.red_budget = static_cast<std::uint64_t>(std::ceil(k * p.peel_radius_mean)) + p.green_budget;
  p.blue_budget = 1;
  return p;
}

// The end-to-end guarantee of the peeling algorithm on n vertices with
// per-invocation delta is (epsilon, 3 n^2 delta); feeding the value below as
// the per-invocation delta yields the requested target.
inline double rescale_delta_for_bounded(double target_delta, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("rescale_delta_for_bounded: empty graph");
  if (!(target_delta >= 0.0)) throw std::invalid_argument("rescale_delta_for_bounded: negative delta");
  return target_delta / (3.0 * static_cast<double>(n) * static_cast<double>(n));
}

enum class Algorithm { unbounded, bounded };

inline std::string to_string(Algorithm a) { return a == Algorithm::unbounded ? "unbounded" : "bounded"; }

// Theory-shaped additive error predictions with unit leading constants and
// n^{o(1)} factors dropped. Monotone in n and A, nonincreasing in epsilon.
inline double predict_error_bound(std::uint64_t n, std::optional<double> weight_bound,
                                  const PrivacyBudget& budget, Algorithm algorithm, Mode mode) {
  if (n == 0) throw std::invalid_argument("predict_error_bound: empty graph");
  if (!(budget.epsilon > 0.0)) throw std::invalid_argument("predict_error_bound: epsilon must be positive");
  if (mode == Mode::approx && !(budget.delta > 0.0))
    throw std::invalid_argument("predict_error_bound: approx mode requires delta > 0");
  double nd = static_cast<double>(n);
  double ln_n = std::log(std::max(nd, 2.0));
  double eps = budget.epsilon;
  if (algorithm == Algorithm::unbounded) {
    if (mode == Mode::approx)
      return std::sqrt(nd) / eps * ln_n * ln_n * std::sqrt(std::log(1.0 / budget.delta));
    return std::pow(nd, 2.0 / 3.0) / eps * ln_n * ln_n * ln_n;
  }
  if (!weight_bound) throw std::invalid_argument("predict_error_bound: bounded algorithm requires a weight bound");
  double a = *weight_bound;
  constexpr double kSqrt2 = 1.4142135623730951;
  constexpr double kSqrt17 = 4.123105625617661;
  if (mode == Mode::approx) {
    double alpha = kSqrt2 - 1.0;
    return std::pow(nd, alpha) * std::sqrt(std::log(1.0 / budget.delta)) *
           (std::pow(a, alpha) / std::pow(eps, 2.0 - kSqrt2) + 1.0 / eps);
  }
  double alpha = (kSqrt17 - 3.0) / 2.0;
  return std::pow(nd, alpha) * (std::pow(a, alpha) / std::pow(eps, (5.0 - kSqrt17) / 2.0) + 1.0 / eps);
}

// --- recursive accounting for the peeling algorithm ---------------------------

// Careful bottom-up cost of one recursive invocation: per iteration the red
// release, the blue release (strong composition across pairs in approx mode),
// and the green slot. Each peeled ball's K recursive calls compose basically;
// disjoint balls compose in parallel, so the per-iteration green cost is the
// maximum over balls. The invocation's end-to-end target is
// (eps_param, 3 n^2 delta_param); within_budget checks the recomputed totals
// against it. Fallback invocations delegate to the hitting-set audit.
struct BoundedAccounting {
  std::uint64_t n = 0;
  std::uint32_t iterations = 0;
  Mode mode = Mode::approx;
  double eps_param = 0.0;
  double delta_param = 0.0;
  bool fallback = false;
  UnboundedAccounting fallback_audit;
  double red_epsilon = 0.0;    // summed over iterations
  double blue_epsilon = 0.0;
  double blue_delta = 0.0;
  double green_epsilon = 0.0;  // per-iteration max over balls, summed over iterations
  double green_delta = 0.0;
  double total_epsilon = 0.0;
  double total_delta = 0.0;
  bool within_budget = false;
  std::vector<BoundedAccounting> children;  // recursive calls: per iteration, ball, repeat
};

}  // namespace dpsp
