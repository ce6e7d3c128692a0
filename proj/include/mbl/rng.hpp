#ifndef MBL_RNG_HPP_
#define MBL_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace mbl {

// Counter-based pseudo-random stream (SplitMix64 output function over a
// per-stream key plus a running counter). Streams derived from distinct
// (seed, run, player, purpose) tuples are statistically independent, which
// makes ensembles embarrassingly parallel and bit-reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t a, std::uint64_t b) {
    return mix(a + 0x9E3779B97F4A7C15ull * (b + 1));
  }

  // Canonical stream layout used throughout: purpose 0 = initial condition,
  // purpose 1 = action sampling.
  static RngStream for_run_player(std::uint64_t master_seed, std::uint64_t run,
                                  std::uint64_t player, std::uint64_t purpose = 0) {
    std::uint64_t k = mix(master_seed);
    k = derive_key(k, run);
    k = derive_key(k, player);
    k = derive_key(k, purpose);
    return RngStream(k);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix(key_ + 0x9E3779B97F4A7C15ull * counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Strictly positive Exp(1) variate.
  double next_exponential() {
    double u = next_unit();
    while (u == 0.0) u = next_unit();
    return -std::log1p(-u);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mbl

#endif  // MBL_RNG_HPP_
