#pragma once

// Shared test utilities: analytic oracles and deterministic random fields.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "usdmplc/field.hpp"
#include "usdmplc/modes.hpp"

namespace usdmplc::testing {

/// Analytic Gaussian-beam radius at distance z for waist w0.
inline double gaussian_beam_width(double w0, double z, double wavelength) {
    const double zr = std::numbers::pi * w0 * w0 / wavelength;
    return w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
}

/// Beam radius from the intensity second moment: w = 2 sigma_x.
inline double measured_width(const Field& f) {
    double p = 0.0, mx = 0.0;
    for (int iy = 0; iy < f.grid.ny; ++iy) {
        for (int ix = 0; ix < f.grid.nx; ++ix) {
            const double w = std::norm(f.at(iy, ix));
            p += w;
            mx += w * f.grid.x(ix);
        }
    }
    mx /= p;
    double var = 0.0;
    for (int iy = 0; iy < f.grid.ny; ++iy) {
        for (int ix = 0; ix < f.grid.nx; ++ix) {
            const double dx = f.grid.x(ix) - mx;
            var += std::norm(f.at(iy, ix)) * dx * dx;
        }
    }
    return 2.0 * std::sqrt(var / p);
}

/// Intensity centroid along x.
inline double centroid_x(const Field& f) {
    double p = 0.0, mx = 0.0;
    for (int iy = 0; iy < f.grid.ny; ++iy) {
        for (int ix = 0; ix < f.grid.nx; ++ix) {
            const double w = std::norm(f.at(iy, ix));
            p += w;
            mx += w * f.grid.x(ix);
        }
    }
    return mx / p;
}

/// Normalized random field whose spectrum is confined to |f| below
/// `band_fraction` of the Nyquist frequency, so it carries no evanescent or
/// wrap-prone content. Deterministic for a given seed.
inline Field random_band_limited_field(const Grid& grid, unsigned seed,
                                       double band_fraction = 0.25) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field spectrum(grid);
    const double f_max = band_fraction * 0.5 / grid.pitch;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            // Draw for every cell to keep the stream layout-independent.
            const double re = gauss(rng), im = gauss(rng);
            const double fr = std::hypot(grid.fx(ix), grid.fy(iy));
            if (fr < f_max) spectrum.at(iy, ix) = Complex{re, im};
        }
    }
    // Synthesize in real space via the propagation path's own FFT would
    // couple the test to the unit under test; a direct DFT is too slow, so
    // build from a few random plane waves instead.
    Field f(grid);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int waves = 24;
    for (int w = 0; w < waves; ++w) {
        const double fx = (2.0 * uni(rng) - 1.0) * f_max;
        const double fy = (2.0 * uni(rng) - 1.0) * f_max;
        const Complex amp{gauss(rng), gauss(rng)};
        const double kx = 2.0 * std::numbers::pi * fx;
        const double ky = 2.0 * std::numbers::pi * fy;
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int ix = 0; ix < grid.nx; ++ix) {
                f.at(iy, ix) += amp * std::polar(1.0, kx * grid.x(ix) + ky * grid.y(iy));
            }
        }
    }
    // Windowed by a broad Gaussian to keep energy away from the edges.
    const double w0 = 0.22 * std::min(grid.extent_x(), grid.extent_y());
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double r2 = grid.x(ix) * grid.x(ix) + grid.y(iy) * grid.y(iy);
            f.at(iy, ix) *= std::exp(-r2 / (w0 * w0));
        }
    }
    return normalized(f);
}

/// Spearman rank correlation of two equally long sequences.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<size_t> idx(v.size());
        for (size_t i = 0; i < v.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
        return r;
    };
    const auto rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mean = (n - 1.0) / 2.0;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace usdmplc::testing
