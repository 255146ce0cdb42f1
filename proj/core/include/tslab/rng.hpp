#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tslab {

// SplitMix64 finalizer; used to derive independent per-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the `counter`-th draw of logical stream `stream` under a user seed.
// Trial loops use this so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter = 0) noexcept {
  return mix64(mix64(seed ^ mix64(stream + 0x51ed270b27a3f1c5ULL)) + counter);
}

namespace streams {
inline constexpr std::uint64_t kSource = 1;
inline constexpr std::uint64_t kCodebook = 2;
inline constexpr std::uint64_t kBinMap = 3;
inline constexpr std::uint64_t kAuxChannel = 4;
inline constexpr std::uint64_t kRestart = 5;
inline constexpr std::uint64_t kSecondCodebook = 6;
inline constexpr std::uint64_t kSecondBinMap = 7;
}  // namespace streams

// mt19937_64 is bit-exact across standard libraries; the distributions are
// not, so uniform variates are formed directly from the raw 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % bound;
  }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler for a finite pmf.
class CategoricalSampler {
 public:
  CategoricalSampler() = default;
  explicit CategoricalSampler(std::span<const double> pmf) {
    cdf_.reserve(pmf.size());
    double acc = 0.0;
    for (double p : pmf) {
      acc += p;
      cdf_.push_back(acc);
    }
    // The last positive-mass symbol absorbs rounding so u < 1 always lands.
    for (std::size_t i = cdf_.size(); i-- > 0;) {
      if (pmf[i] > 0.0) {
        for (std::size_t j = i; j < cdf_.size(); ++j) cdf_[j] = 2.0;
        break;
      }
    }
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(it - cdf_.begin());
  }

  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace tslab
