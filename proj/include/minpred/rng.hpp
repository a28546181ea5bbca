#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace minpred {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-reproducible across platforms and standard-library versions; every
// stochastic component of the library draws from this engine only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via the polar method (second draw cached).
  double normal();

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates permutation of {0, 1, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Deterministic derivation of child-stream seeds from (seed, tag).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Tags for derived streams; keep distinct so independent components never
// share a stream under the same master seed.
namespace seed_tag {
inline constexpr std::uint64_t kAugment = 0x6175676d656e7400ULL;
inline constexpr std::uint64_t kTarget = 0x7461726765740000ULL;
inline constexpr std::uint64_t kRollout = 0x726f6c6c6f757400ULL;
inline constexpr std::uint64_t kGraph = 0x6772617068000000ULL;
inline constexpr std::uint64_t kLambda = 0x6c616d6264610000ULL;
inline constexpr std::uint64_t kBenchmark = 0x62656e6368000000ULL;
inline constexpr std::uint64_t kJitter = 0x6a69747465720000ULL;
}  // namespace seed_tag

}  // namespace minpred
