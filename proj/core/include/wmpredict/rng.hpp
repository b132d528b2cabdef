#pragma once

#include <cstdint>
#include <vector>

namespace wmp {

// Deterministic portable PRNG: xoshiro256++ seeded through SplitMix64.
// The stream depends only on the seed, never on the platform or standard
// library, so seeded runs reproduce bit-identically everywhere. Gaussians
// come from a Box-Muller transform with a cached spare.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  void reseed(std::uint64_t seed);
  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  // Independent stream derived from this generator's original seed and a tag;
  // insensitive to how much of the parent stream has been consumed.
  Rng child(std::uint64_t tag) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t s_[4] = {};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 mix step, also used to derive per-job seeds from (seed, tag).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace wmp
