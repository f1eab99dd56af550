#pragma once

#include <complex>
#include <vector>

namespace pdlab::fft {

// In-place complex DFT over a row-major multi-dimensional array (last axis
// fastest). forward: X_m = sum_s x_s exp(-2 pi i m.s/M); inverse uses the
// conjugate phase. Neither direction is normalized -- callers attach their
// own quadrature weights.
void dft(std::complex<double>* data, const std::vector<int>& dims, bool inverse);

}  // namespace pdlab::fft
