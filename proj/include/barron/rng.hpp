#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace barron {

// Counter-based random stream: output i is a pure function of (seed, i),
// so independent trials can derive child streams and results do not depend
// on scheduling. SplitMix64 finalizer over a Weyl sequence.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(seed_ + 0xA0761D6478BD642Full * (++counter_)); }

  // Uniform on [0,1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Independent stream derived from this seed and an index.
  CounterRng child(std::uint64_t index) const {
    return CounterRng(mix(seed_ ^ mix(index + 0x632BE59BD9B4E019ull)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// Index of a categorical draw given (not necessarily normalized) weights.
inline std::size_t categorical(CounterRng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

// Halton low-discrepancy sequence in (0,1)^d, 1-based index so the origin
// is never produced. Used for assumption audits and QMC integration.
class Halton {
 public:
  explicit Halton(int dim);
  std::vector<double> point(std::uint64_t index) const;  // index >= 1

 private:
  std::vector<int> bases_;
};

inline Halton::Halton(int dim) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  bases_.assign(primes, primes + dim);
}

inline std::vector<double> Halton::point(std::uint64_t index) const {
  std::vector<double> x(bases_.size());
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const std::uint64_t b = static_cast<std::uint64_t>(bases_[j]);
    double f = 1.0, r = 0.0;
    std::uint64_t i = index;
    while (i > 0) {
      f /= static_cast<double>(b);
      r += f * static_cast<double>(i % b);
      i /= b;
    }
    x[j] = r;
  }
  return x;
}

}  // namespace barron
