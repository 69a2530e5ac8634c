#pragma once

#include <cmath>
#include <cstdint>

namespace ffr {

// Counter-based SplitMix64 stream. Streams are keyed by (seed, stream id),
// so replications can draw from independent substreams regardless of the
// number of worker threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : ctr_(0) {
    key_ = mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL));
    has_cached_ = false;
  }

  std::uint64_t next_u64() {
    ctr_ += 0x9E3779B97F4A7C15ULL;
    return mix(key_ + ctr_);
  }

  // Uniform on (0,1).
  double next_uniform() {
    std::uint64_t u = next_u64();
    double x = static_cast<double>(u >> 11) * 0x1.0p-53;
    return x > 0.0 ? x : 0x1.0p-53;
  }

  // Standard normal via Box-Muller, second deviate cached.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    cached_ = rad * std::sin(ang);
    has_cached_ = true;
    return rad * std::cos(ang);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
  double cached_;
  bool has_cached_;
};

}  // namespace ffr
