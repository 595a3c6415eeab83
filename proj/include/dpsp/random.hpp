#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace dpsp {

namespace detail {

// SplitMix64 finalizer; full-period mixer used to key substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Inverse CDF of the Laplace distribution with the given scale.
// u must lie in (0, 1); u = 1/2 maps to exactly 0.
inline double laplace_quantile(double u, double scale) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("laplace_quantile: u outside (0,1)");
  if (scale < 0.0) throw std::invalid_argument("laplace_quantile: negative scale");
  if (scale == 0.0) return 0.0;
  double h = u - 0.5;
  double sgn = (h > 0.0) - (h < 0.0);
  return -scale * sgn * std::log1p(-2.0 * std::fabs(h));
}

// Inverse CDF of the exponential distribution with the given mean.
// u must lie in [0, 1); u = 1 - 1/e maps to exactly the mean.
inline double expo_quantile(double u, double mean) {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("expo_quantile: u outside [0,1)");
  if (mean < 0.0) throw std::invalid_argument("expo_quantile: negative mean");
  if (mean == 0.0) return 0.0;
  return -mean * std::log1p(-u);
}

// Deterministic random stream keyed by (seed, stream id).
// Identical (seed, id, draw index) triples yield identical values on every
// platform: the engine is the fully specified mt19937_64 and all mappings to
// doubles/integers below avoid implementation-defined library distributions.
// Substreams derived via split() are keyed so that distinct split paths give
// independent streams regardless of scheduling or evaluation order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), id_(stream_id),
        eng_(detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(stream_id))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return id_; }

  // Child stream whose id mixes this stream's id with the given key.
  RandomStream split(std::uint64_t key) const {
    return RandomStream(seed_, detail::splitmix64(id_ ^ detail::splitmix64(key + 0x51ed2701a3b5efc7ULL)));
  }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform draw in the open interval (0, 1); endpoints are unreachable.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  // Unbiased uniform integer in [0, bound) via rejection.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    for (;;) {
      std::uint64_t x = eng_();
      if (x <= limit) return x % bound;
    }
  }

  // Laplace(scale) sample; scale 0 collapses to exactly 0.
  double laplace(double scale) {
    if (scale < 0.0) throw std::invalid_argument("laplace: negative scale");
    if (scale == 0.0) { (void)uniform01(); return 0.0; }
    return laplace_quantile(uniform01(), scale);
  }

  // Exponential(mean) sample; mean 0 collapses to exactly 0.
  double expo(double mean) {
    if (mean < 0.0) throw std::invalid_argument("expo: negative mean");
    if (mean == 0.0) { (void)uniform01(); return 0.0; }
    return expo_quantile(uniform01(), mean);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t id_;
  std::mt19937_64 eng_;
};

// k distinct values from {0, ..., n-1}, sorted ascending.
// Floyd's algorithm: draw count is exactly k for every outcome, which keeps
// downstream draw indices independent of the sampled set.
inline std::vector<std::uint32_t> sample_without_replacement(std::uint64_t n, std::uint64_t k,
                                                             RandomStream& stream) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  auto contains = [&](std::uint32_t v) {
    for (std::uint32_t x : out) if (x == v) return true;
    return false;
  };
  for (std::uint64_t j = n - k; j < n; ++j) {
    std::uint32_t t = static_cast<std::uint32_t>(stream.uniform_below(j + 1));
    if (contains(t)) out.push_back(static_cast<std::uint32_t>(j));
    else out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dpsp
