#pragma once

#include <complex>
#include <vector>

#include "usdmplc/grid.hpp"

namespace usdmplc {

using Complex = std::complex<double>;

/// Complex scalar amplitude sampled on a Grid, stored row-major (ny rows of
/// nx samples). A normalized field has sum(|a|^2) * pitch^2 == 1.
struct Field {
    Grid grid;
    std::vector<Complex> amplitude;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), amplitude(static_cast<size_t>(g.pixels())) {}

    Complex& at(int iy, int ix) { return amplitude[static_cast<size_t>(iy) * grid.nx + ix]; }
    const Complex& at(int iy, int ix) const {
        return amplitude[static_cast<size_t>(iy) * grid.nx + ix];
    }

    /// Total power: sum(|a|^2) * pitch^2.
    double power() const;
};

/// Riemann-sum inner product sum(conj(f) * g) * pitch^2.
/// Conjugate-linear in the first argument. Grids must match exactly.
Complex inner_product(const Field& f, const Field& g);

/// sqrt(<f|f>).
double field_norm(const Field& f);

/// Scales the field so that field_norm(f) == 1. Zero fields are rejected.
Field normalized(const Field& f);

}  // namespace usdmplc
