#pragma once

#include <cmath>
#include <cstdint>

namespace rissim {

// Deterministic 64-bit generator (splitmix64). Used instead of <random>
// distributions so draws are bit-identical across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1); never returns 0, so log() is safe.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  // Box-Muller pair of independent standard normals.
  void normal_pair(double& a, double& b) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    a = r * std::cos(t);
    b = r * std::sin(t);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t scramble64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Order-sensitive seed combinator; chain to derive per-link substreams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return scramble64(a + 0x9e3779b97f4a7c15ull * (b + 0x632be59bd9b4e019ull));
}

}  // namespace rissim
