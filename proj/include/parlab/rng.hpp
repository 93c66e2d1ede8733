#ifndef PARLAB_RNG_HPP
#define PARLAB_RNG_HPP

#include <cstdint>

#include "parlab/common.hpp"

namespace parlab {

// Counter-based generator in SplitMix64 output mode: the k-th variate of
// stream (seed, stream_id) is a pure function of (seed, stream_id, k), so
// substreams can be consumed in parallel and merged in any order with
// bit-identical results.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

    // Uniform in [0, 1).
    Real next_real() { return Real(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace parlab

#endif
