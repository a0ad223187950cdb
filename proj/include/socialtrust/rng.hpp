#pragma once

// Deterministic sampling utilities. The mt19937_64 engine is fully specified
// by the standard, but the <random> distributions are not, so every sampler
// here is spelled out to keep simulation output byte-identical across
// toolchains.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace socialtrust {

// One SplitMix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base ^ (0xd1b54a32d192ed03ull * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Box-Muller; the spare value is cached, which is still deterministic.
  double normal(double mean, double sd) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sd * spare_;
    }
    double u1, u2;
    do {
      u1 = unit();
    } while (u1 <= 0.0);
    u2 = unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + sd * radius * std::cos(angle);
  }

  double lognormal(double mu, double sigma) {
    return std::exp(normal(mu, sigma));
  }

  // Exact Poisson sampling. Large rates are split into chunks small enough
  // for Knuth's product method (Poisson is additive in its rate).
  std::int64_t poisson(double lambda) {
    std::int64_t total = 0;
    while (lambda > 30.0) {
      total += poisson_knuth(30.0);
      lambda -= 30.0;
    }
    return total + poisson_knuth(lambda);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(eng_() >> 56);
    return out;
  }

 private:
  std::int64_t poisson_knuth(double lambda) {
    if (lambda <= 0.0) return 0;
    const double threshold = std::exp(-lambda);
    double product = 1.0;
    std::int64_t k = 0;
    do {
      ++k;
      product *= unit();
    } while (product > threshold);
    return k - 1;
  }

  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Log-normal parameters matching a target mean and standard deviation.
struct LogNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
};

inline LogNormalParams lognormal_from_moments(double mean, double sd) {
  const double variance_ratio = (sd * sd) / (mean * mean);
  LogNormalParams p;
  p.sigma = std::sqrt(std::log1p(variance_ratio));
  p.mu = std::log(mean) - 0.5 * p.sigma * p.sigma;
  return p;
}

}  // namespace socialtrust
