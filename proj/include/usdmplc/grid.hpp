#pragma once

namespace usdmplc {

/// Discretized transverse plane. Coordinates are centered on the grid
/// midpoint (x = 0 at index nx/2). Spatial frequencies are in cycles/meter
/// and follow standard FFT ordering: non-negative frequencies first,
/// negative frequencies in the upper half of the index range.
struct Grid {
    int nx = 0;               ///< pixel count along x (even)
    int ny = 0;               ///< pixel count along y (even)
    double pitch = 0.0;       ///< pixel size, meters
    double wavelength = 0.0;  ///< meters

    double extent_x() const { return nx * pitch; }
    double extent_y() const { return ny * pitch; }
    double cell_area() const { return pitch * pitch; }

    double x(int ix) const { return (ix - nx / 2) * pitch; }
    double y(int iy) const { return (iy - ny / 2) * pitch; }

    /// FFT-ordered spatial frequency for column ix, cycles/meter.
    double fx(int ix) const {
        const int k = ix < nx / 2 ? ix : ix - nx;
        return k / (nx * pitch);
    }
    /// FFT-ordered spatial frequency for row iy, cycles/meter.
    double fy(int iy) const {
        const int k = iy < ny / 2 ? iy : iy - ny;
        return k / (ny * pitch);
    }

    int pixels() const { return nx * ny; }

    bool operator==(const Grid&) const = default;
};

/// Validates and constructs a Grid. Pixel counts must be positive and even
/// (odd counts would break the centered FFT indexing used throughout).
Grid make_grid(int nx, int ny, double pitch, double wavelength);

}  // namespace usdmplc
