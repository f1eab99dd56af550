#include "pdlab/fft.hpp"

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace pdlab::fft {
namespace {

// FFTW plan creation is not thread-safe, and plans are reused heavily (every
// norm evaluation transforms fields of the same handful of shapes), so keep a
// process-wide cache guarded by a mutex. FFTW_UNALIGNED lets a cached plan run
// on any buffer via fftw_execute_dft.
std::mutex plan_mutex;

fftw_plan plan_for(const std::vector<int>& dims, int sign) {
  static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(dims, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  std::vector<std::complex<double>> scratch(total);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                 ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw std::runtime_error("fftw_plan_dft failed");
  cache.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void dft(std::complex<double>* data, const std::vector<int>& dims, bool inverse) {
  if (dims.empty()) throw std::invalid_argument("dft: empty dimension list");
  for (int d : dims)
    if (d <= 0) throw std::invalid_argument("dft: non-positive dimension");
  fftw_plan plan = plan_for(dims, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

}  // namespace pdlab::fft
