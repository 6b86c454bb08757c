#pragma once

#include <cstdint>
#include <string>

namespace acdc {

// Deterministic, platform-independent generator (xoshiro256**, seeded via
// splitmix64). The algorithm name travels with checkpoints so runs replay
// across builds.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256ss";

  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::string algorithm() const { return kAlgorithm; }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53-bit resolution.
  double next_double();
  // Uniform integer in [0, bound), bias-free via rejection.
  std::uint64_t next_below(std::uint64_t bound);
  // Standard normal via Box-Muller (deterministic pair caching).
  double next_normal();

  // Fisher-Yates shuffle of [0, n) index permutation.
  template <typename Seq>
  void shuffle(Seq& seq) {
    for (std::size_t i = seq.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(seq[i - 1], seq[j]);
    }
  }

  // Independent stream for parallel seeds: mixes the tag into the seed.
  SeededRng fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace acdc
