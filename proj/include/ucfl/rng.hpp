#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ucfl {

namespace detail {

// SplitMix64 finalizer; statistically solid and cheap.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Well-known fork tags so that every consumer of randomness draws from its
// own stream, keyed by purpose (and further by client id / round where
// applicable). Keeps results independent of execution order.
namespace rng_purpose {
inline constexpr std::uint64_t blobs = 0x01;
inline constexpr std::uint64_t partition = 0x02;
inline constexpr std::uint64_t label_permutation = 0x03;
inline constexpr std::uint64_t holdout = 0x04;
inline constexpr std::uint64_t model_init = 0x05;
inline constexpr std::uint64_t client_update = 0x06;
inline constexpr std::uint64_t variance = 0x07;
inline constexpr std::uint64_t kmeans = 0x08;
}  // namespace rng_purpose

// Deterministic counter-based generator (SplitMix64). The same seed and fork
// path always reproduce the identical sample sequence, on any thread, in any
// interleaving with other streams.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : state_(detail::mix64(seed ^ 0x5bf0363db2a3c60bULL)) {}

  // Derives an independent child stream; does not advance this stream.
  RngStream fork(std::uint64_t tag) const {
    RngStream child(0);
    child.state_ = detail::mix64(state_ ^ detail::mix64(tag ^ 0x94d049bb133111ebULL));
    return child;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; the spare draw is cached per stream.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double u = next_double();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Symmetric Dirichlet draw, concentration alpha per component.
  std::vector<double> next_dirichlet(double alpha, int components) {
    std::vector<double> g(static_cast<std::size_t>(components));
    double total = 0.0;
    for (auto& gi : g) {
      gi = next_gamma(alpha);
      total += gi;
    }
    if (total <= 0.0) {
      // Numerically possible for tiny alpha; fall back to a point mass.
      const auto idx = next_below(static_cast<std::uint64_t>(components));
      for (auto& gi : g) gi = 0.0;
      g[static_cast<std::size_t>(idx)] = 1.0;
      return g;
    }
    for (auto& gi : g) gi /= total;
    return g;
  }

  // Fisher-Yates; uses this stream's own draws only.
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = next_below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<int> next_permutation_of(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ucfl
