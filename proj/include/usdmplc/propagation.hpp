#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "usdmplc/field.hpp"

namespace usdmplc {

/// Per-frequency factors of the angular-spectrum propagator over a fixed
/// distance. Propagating components ((2pi/lambda)^2 >= |k_t|^2) carry the
/// unit-modulus factor exp(-i sqrt((2pi/lambda)^2 - |k_t|^2) * distance);
/// evanescent components are zeroed rather than attenuated, so that
/// kernel(-a) = conj(kernel(a)) and back-propagation stays a clean adjoint.
struct SpectralKernel {
    Grid grid;
    double distance = 0.0;               ///< meters; negative = backward
    std::vector<Complex> factors;        ///< ny*nx, FFT frequency ordering
    std::vector<std::uint8_t> evanescent;  ///< 1 where the factor was zeroed
};

SpectralKernel make_kernel(const Grid& grid, double distance);

/// Shared, thread-safe cache of kernels keyed by (grid, distance).
/// Caching is an implementation detail and never changes results.
std::shared_ptr<const SpectralKernel> cached_kernel(const Grid& grid, double distance);

/// Angular-spectrum propagation: IFFT(kernel * FFT(field)).
/// `guard_factor` >= 1 optionally embeds the field in a grid enlarged by
/// that factor during the transform to suppress periodic wrap-around
/// (default 1 = off; the plain periodic model).
Field propagate(const Field& field, double distance, int guard_factor = 1);

}  // namespace usdmplc
