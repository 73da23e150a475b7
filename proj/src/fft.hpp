#pragma once

#include <complex>

namespace usdmplc::detail {

// 2D FFT of a row-major ny x nx complex buffer, in place. FFTW plans are
// cached per (ny, nx, direction) behind a mutex so concurrent transforms of
// distinct buffers are safe. Plans use FFTW_ESTIMATE: plan choice must not
// depend on runtime timing, or results would not be bit-reproducible.
// Transforms are unnormalized (forward followed by inverse scales by nx*ny).
void fft2(int ny, int nx, std::complex<double>* data, bool inverse);

}  // namespace usdmplc::detail
