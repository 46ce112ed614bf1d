#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace capmatch {

// Counter-based generator: the state advances by a fixed odd increment and
// the output is a bijective mix of the state, so the k-th draw of a stream
// is a pure function of (seed, k). Streams for parallel work are derived by
// hashing a (master seed, id path) tuple, never by sharing a generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Sum of n independent Bernoulli(p) trials. The draw count is fixed at n,
  // which keeps paired runs with a shared arrival stream aligned.
  long binomial(long n, double p) {
    long hits = 0;
    for (long k = 0; k < n; ++k) hits += bernoulli(p) ? 1 : 0;
    return hits;
  }

  // Index sampled proportionally to nonnegative weights; weights need not sum to 1.
  int sample_discrete(const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    double u = next_double() * total;
    for (int k = 0; k + 1 < weights.size(); ++k) {
      u -= weights(k);
      if (u < 0) return k;
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t k = items.size(); k > 1; --k) {
      std::swap(items[k - 1], items[bounded(k)]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stream-splitting rule: fold each path element into the seed through the
// same mixer, so stream(master, {a, b}) is reproducible and independent of
// the order in which sibling streams are consumed.
inline SplitMix64 derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = SplitMix64::mix(master);
  for (std::uint64_t id : path) s = SplitMix64::mix(s ^ SplitMix64::mix(id));
  return SplitMix64(s);
}

}  // namespace capmatch
