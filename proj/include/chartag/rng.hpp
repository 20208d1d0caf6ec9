#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chartag {

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from a base seed. Used so that
// initialization, dropout, shuffling and data synthesis draw from
// separate reproducible sequences.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamDropout = 2;
inline constexpr std::uint64_t kStreamShuffle = 3;
inline constexpr std::uint64_t kStreamSplit = 4;
inline constexpr std::uint64_t kStreamSynth = 5;

// Deterministic RNG built on std::mt19937_64 raw draws with explicit
// reductions, so any consumer sequence can be reproduced independently.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * kInv53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform over {0,...,n-1} by modulo reduction. n must be positive.
  int below(int n);

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates: for i = n-1 down to 1, swap v[i] with v[below(i+1)].
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      int j = below(static_cast<int>(i));
      std::swap(v[i - 1], v[static_cast<std::size_t>(j)]);
    }
  }

  std::string save_state() const;
  void load_state(const std::string& s);

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;
  std::mt19937_64 gen_;
};

}  // namespace chartag
