#pragma once

#include <cstdint>
#include <random>

namespace glv {

// SplitMix64 (Steele, Lea, Flood). Used only to derive independent stream
// seeds from one master seed; the streams themselves are mt19937_64.
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  uint64_t state_;
};

// Seed of stream `index` under `master`; independent of evaluation order.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  SplitMix64 outer(master);
  SplitMix64 inner(outer.next() ^ (index * 0xD1B54A32D192ED03ULL));
  return inner.next();
}

inline std::mt19937_64 stream_engine(uint64_t master, uint64_t index) {
  return std::mt19937_64(derive_seed(master, index));
}

} // namespace glv
