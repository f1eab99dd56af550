#pragma once

#include <cstdint>

namespace pdlab {

// Counter-style hashing (splitmix64 finalizer). Deterministic across
// platforms, so every randomized experiment is reproducible from (seed, key)
// alone with no stateful generator to thread through call sites.
std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combine for building keys out of several integers.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a + 0x9e3779b97f4a7c15ULL * (b + 1));
}

// Uniform double in [0, 1) from a hashed key.
double unit_real(std::uint64_t key);

// Standard normal pair (Box-Muller) from a hashed key.
void normal_pair(std::uint64_t key, double& g0, double& g1);

// +1 or -1 from a hashed key.
inline int rademacher(std::uint64_t key) {
  return (splitmix64(key) >> 32) & 1 ? 1 : -1;
}

// FNV-1a over a byte string; used for config hashing and id-derived streams.
std::uint64_t fnv1a(const void* data, std::uint64_t size);
std::uint64_t fnv1a_str(const char* s);

}  // namespace pdlab
