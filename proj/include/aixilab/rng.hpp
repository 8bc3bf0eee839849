#pragma once

#include <cstdint>
#include <random>

#include "aixilab/rational.hpp"

namespace aixilab {

// splitmix64: used to derive independent substreams from (seed, stream id) and as
// the stand-in source for the incomputable odd bits of the selected-bits task.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x51ed270b0a3f4c11ULL));
}

// Deterministic RNG wrapper.  mt19937_64 output is pinned by the standard; the
// uniform draws below avoid std distributions so results do not depend on the
// standard library implementation.
class rng {
 public:
  explicit rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Exact Bernoulli draw for a rational p in [0, 1]: compare a 63-bit integer
  // draw against floor(p * 2^63); bias is at most 2^-63.
  bool bernoulli(const rational& p) {
    const bigint scaled = (numerator(p) << 63) / denominator(p);
    const uint64_t threshold = scaled.convert_to<uint64_t>();
    return (engine_() >> 1) < threshold;
  }

  uint32_t below(uint32_t n) {  // uniform in [0, n)
    return uint32_t(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aixilab
