#include "usdmplc/propagation.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fft.hpp"
#include "usdmplc/errors.hpp"

namespace usdmplc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex kernel_mutex;
using KernelKey = std::tuple<int, int, double, double, double>;
std::map<KernelKey, std::shared_ptr<const SpectralKernel>> kernel_cache;

}  // namespace

SpectralKernel make_kernel(const Grid& grid, double distance) {
    if (!std::isfinite(distance)) throw InvalidArgument("make_kernel: distance must be finite");
    SpectralKernel k;
    k.grid = grid;
    k.distance = distance;
    k.factors.resize(static_cast<size_t>(grid.pixels()));
    k.evanescent.assign(static_cast<size_t>(grid.pixels()), 0);

    const double k0 = kTwoPi / grid.wavelength;
    const double k0_sq = k0 * k0;
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double ky = kTwoPi * grid.fy(iy);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double kx = kTwoPi * grid.fx(ix);
            const double kt_sq = kx * kx + ky * ky;
            const size_t idx = static_cast<size_t>(iy) * grid.nx + ix;
            if (kt_sq <= k0_sq) {
                const double kz = std::sqrt(k0_sq - kt_sq);
                k.factors[idx] = std::polar(1.0, -kz * distance);
            } else {
                k.factors[idx] = Complex{0.0, 0.0};
                k.evanescent[idx] = 1;
            }
        }
    }
    return k;
}

std::shared_ptr<const SpectralKernel> cached_kernel(const Grid& grid, double distance) {
    const KernelKey key{grid.nx, grid.ny, grid.pitch, grid.wavelength, distance};
    std::lock_guard<std::mutex> lock(kernel_mutex);
    auto it = kernel_cache.find(key);
    if (it != kernel_cache.end()) return it->second;
    auto kernel = std::make_shared<const SpectralKernel>(make_kernel(grid, distance));
    kernel_cache.emplace(key, kernel);
    return kernel;
}

namespace {

// Core transform on the field's own grid.
void propagate_in_place(Field& f, double distance) {
    auto kernel = cached_kernel(f.grid, distance);
    detail::fft2(f.grid.ny, f.grid.nx, f.amplitude.data(), false);
    const double scale = 1.0 / f.grid.pixels();
    for (size_t i = 0; i < f.amplitude.size(); ++i) {
        f.amplitude[i] *= kernel->factors[i] * scale;
    }
    detail::fft2(f.grid.ny, f.grid.nx, f.amplitude.data(), true);
}

}  // namespace

Field propagate(const Field& field, double distance, int guard_factor) {
    if (guard_factor < 1) throw InvalidArgument("propagate: guard_factor must be >= 1");
    if (field.amplitude.size() != static_cast<size_t>(field.grid.pixels())) {
        throw InvalidArgument("propagate: field shape does not match its grid");
    }
    if (guard_factor == 1) {
        Field out = field;
        propagate_in_place(out, distance);
        return out;
    }

    const Grid& g = field.grid;
    Grid big = g;
    big.nx = g.nx * guard_factor;
    big.ny = g.ny * guard_factor;
    const int ox = (big.nx - g.nx) / 2;
    const int oy = (big.ny - g.ny) / 2;

    Field padded(big);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) padded.at(iy + oy, ix + ox) = field.at(iy, ix);
    propagate_in_place(padded, distance);

    Field out(g);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) out.at(iy, ix) = padded.at(iy + oy, ix + ox);
    return out;
}

}  // namespace usdmplc
