#pragma once

#include <cstdint>
#include <random>

#include "irbmr/normal.hpp"

namespace irbmr {

// One step of SplitMix64 (Steele, Lea & Flood 2014). Used to whiten seed
// material before it reaches the main generator.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the random stream of one simulation block. Streams are addressed
// by (seed, scenario, block), never handed out in spawn order, so results do
// not depend on the number of worker threads.
inline std::uint64_t derive_stream_seed(std::uint64_t seed,
                                        std::uint32_t scenario_id,
                                        std::uint64_t block) noexcept {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t{scenario_id} + 1));
  h = splitmix64(s);
  s = h ^ block;
  return splitmix64(s);
}

// Uniform and standard normal variates with bit-reproducible output. The
// uniform takes the top 53 bits of a Mersenne Twister draw, centered so the
// result is strictly inside (0, 1); normals are produced by inverting the
// CDF, which keeps the draw-to-variate mapping identical across platforms.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t stream_seed) : eng_(stream_seed) {}

  double uniform() {
    const std::uint64_t bits = eng_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

  double normal() { return norm_quantile(uniform()); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace irbmr
