#include "pdlab/random.hpp"

#include <cmath>
#include <cstring>

namespace pdlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_real(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

void normal_pair(std::uint64_t key, double& g0, double& g1) {
  double u1 = unit_real(mix(key, 0x6e6f726d31ULL));
  double u2 = unit_real(mix(key, 0x6e6f726d32ULL));
  double r = std::sqrt(-2.0 * std::log1p(u1 - 1.0 + 0x1.0p-53));  // avoid log(0)
  g0 = r * std::cos(2.0 * M_PI * u2);
  g1 = r * std::sin(2.0 * M_PI * u2);
}

std::uint64_t fnv1a(const void* data, std::uint64_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_str(const char* s) { return fnv1a(s, std::strlen(s)); }

}  // namespace pdlab
