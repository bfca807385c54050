#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace gbs {

/// SplitMix64 finalizer; the stream-derivation primitive.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream seed for work unit `index` under `master_seed`. Distinct indices
/// give independent streams; the mapping is pure, so results do not depend
/// on scheduling or thread count.
inline std::uint64_t derived_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Deterministic Gaussian stream: mt19937_64 + explicit Box-Muller (the
/// stdlib normal_distribution algorithm is implementation-defined, which
/// would break the byte-reproducibility contract).
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // strictly inside (0,1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill(std::span<double> out, double stddev) {
    for (auto& x : out) x = stddev * next();
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gbs
