#include "usdmplc/grid.hpp"

#include <string>

#include "usdmplc/errors.hpp"

namespace usdmplc {

Grid make_grid(int nx, int ny, double pitch, double wavelength) {
    if (nx < 2 || ny < 2) {
        throw InvalidArgument("grid dimensions must be at least 2, got " + std::to_string(nx) +
                              "x" + std::to_string(ny));
    }
    if (nx % 2 != 0 || ny % 2 != 0) {
        throw InvalidArgument("grid dimensions must be even, got " + std::to_string(nx) + "x" +
                              std::to_string(ny));
    }
    if (!(pitch > 0.0)) {
        throw InvalidArgument("grid pitch must be positive");
    }
    if (!(wavelength > 0.0)) {
        throw InvalidArgument("wavelength must be positive");
    }
    return Grid{nx, ny, pitch, wavelength};
}

}  // namespace usdmplc
