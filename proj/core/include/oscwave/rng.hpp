// Counter-based splittable Gaussian streams: every (seed, replica, step,
// cell) key maps to an independent pair of standard normals through a
// splitmix64 finalizer chain + Box-Muller. Draws are pure functions of the
// key, so parallel sampling is reproducible regardless of thread count.
#pragma once

#include <cmath>
#include <cstdint>

namespace oscwave::rng {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct NormalPair {
  double z0;
  double z1;
};

inline NormalPair counter_normals(uint64_t seed, uint64_t replica, uint64_t step, uint64_t cell) {
  uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ replica);
  k = splitmix64(k ^ step);
  k = splitmix64(k ^ cell);
  const uint64_t a = splitmix64(k);
  const uint64_t b = splitmix64(k ^ 0xda3e39cb94b95bdbULL);
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1p-53;
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace oscwave::rng
