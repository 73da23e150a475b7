#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "usdmplc/errors.hpp"
#include "usdmplc/modes.hpp"
#include "usdmplc/propagation.hpp"

using namespace usdmplc;

namespace {
const Grid kGrid = make_grid(256, 256, 8e-6, 633e-9);
}

TEST_CASE("kernel at zero distance and zero frequency") {
    const SpectralKernel k0 = make_kernel(kGrid, 0.0);
    for (size_t i = 0; i < k0.factors.size(); ++i) {
        if (!k0.evanescent[i]) CHECK(std::abs(k0.factors[i] - Complex{1.0, 0.0}) < 1e-15);
    }

    const double alpha = 0.017;
    const SpectralKernel k = make_kernel(kGrid, alpha);
    const Complex dc = k.factors[0];
    const Complex expected = std::polar(1.0, -2.0 * std::numbers::pi * alpha / kGrid.wavelength);
    CHECK(std::abs(dc - expected) < 1e-9);
}

TEST_CASE("kernel semigroup and conjugation identities") {
    const SpectralKernel ka = make_kernel(kGrid, 0.011);
    const SpectralKernel kb = make_kernel(kGrid, 0.006);
    const SpectralKernel kab = make_kernel(kGrid, 0.017);
    const SpectralKernel kneg = make_kernel(kGrid, -0.011);
    for (size_t i = 0; i < ka.factors.size(); ++i) {
        if (ka.evanescent[i]) {
            CHECK(std::abs(ka.factors[i]) == 0.0);
            continue;
        }
        CHECK(std::abs(ka.factors[i] * kb.factors[i] - kab.factors[i]) < 1e-9);
        CHECK(std::abs(std::conj(ka.factors[i]) - kneg.factors[i]) < 1e-15);
        CHECK(std::abs(std::abs(ka.factors[i]) - 1.0) < 1e-15);
    }
}

TEST_CASE("propagate identity and inverse") {
    const Field f = hermite_gaussian(kGrid, 1, 2, 100e-6);

    const Field same = propagate(f, 0.0);
    double max_diff = 0.0, peak = 0.0;
    for (size_t i = 0; i < f.amplitude.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(same.amplitude[i] - f.amplitude[i]));
        peak = std::max(peak, std::abs(f.amplitude[i]));
    }
    CHECK(max_diff < 1e-12 * peak);

    const Field round = propagate(propagate(f, 0.017), -0.017);
    double err = 0.0;
    for (size_t i = 0; i < f.amplitude.size(); ++i) {
        err += std::norm(round.amplitude[i] - f.amplitude[i]);
    }
    CHECK(std::sqrt(err * kGrid.cell_area()) < 1e-9);
}

TEST_CASE("gaussian beam width follows the analytic law within 1%") {
    const double w0 = 100e-6;
    const double zr = std::numbers::pi * w0 * w0 / kGrid.wavelength;
    const Field f = hermite_gaussian(kGrid, 0, 0, w0);
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        const double z = frac * zr;
        const Field out = propagate(f, z);
        const double measured = testing::measured_width(out);
        const double expected = testing::gaussian_beam_width(w0, z, kGrid.wavelength);
        CHECK(std::abs(measured - expected) / expected < 0.01);
    }
}

TEST_CASE("unitarity on band-limited fields") {
    const Grid grid = make_grid(128, 128, 8e-6, 633e-9);
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Field f = testing::random_band_limited_field(grid, 10 + seed);
        const Field g = testing::random_band_limited_field(grid, 200 + seed);
        const Complex before = inner_product(f, g);
        const Complex after = inner_product(propagate(f, 0.02), propagate(g, 0.02));
        CHECK(std::abs(before - after) < 1e-9);
        CHECK(std::abs(propagate(f, 0.02).power() - 1.0) < 1e-9);
    }
}

TEST_CASE("semigroup property on fields") {
    const Grid grid = make_grid(128, 128, 8e-6, 633e-9);
    const Field f = testing::random_band_limited_field(grid, 7);
    const Field oneshot = propagate(f, 0.017);
    const Field twostep = propagate(propagate(f, 0.009), 0.008);
    double err = 0.0;
    for (size_t i = 0; i < f.amplitude.size(); ++i) {
        err += std::norm(oneshot.amplitude[i] - twostep.amplitude[i]);
    }
    CHECK(std::sqrt(err * grid.cell_area()) < 1e-10);
}

TEST_CASE("adjoint identity <P(a)f|g> == <f|P(-a)g>") {
    const Grid grid = make_grid(128, 128, 8e-6, 633e-9);
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Field f = testing::random_band_limited_field(grid, 40 + seed);
        const Field g = testing::random_band_limited_field(grid, 300 + seed);
        const Complex lhs = inner_product(propagate(f, 0.013), g);
        const Complex rhs = inner_product(f, propagate(g, -0.013));
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("linearity in the field argument") {
    const Grid grid = make_grid(64, 64, 8e-6, 633e-9);
    const Field f = testing::random_band_limited_field(grid, 3);
    const Field g = testing::random_band_limited_field(grid, 4);
    const Complex a{0.6, -0.3}, b{-0.4, 0.2};
    Field mix(grid);
    for (size_t i = 0; i < mix.amplitude.size(); ++i) {
        mix.amplitude[i] = a * f.amplitude[i] + b * g.amplitude[i];
    }
    const Field lhs = propagate(mix, 0.01);
    const Field pf = propagate(f, 0.01);
    const Field pg = propagate(g, 0.01);
    double max_diff = 0.0, peak = 0.0;
    for (size_t i = 0; i < lhs.amplitude.size(); ++i) {
        max_diff = std::max(max_diff,
                            std::abs(lhs.amplitude[i] - (a * pf.amplitude[i] + b * pg.amplitude[i])));
        peak = std::max(peak, std::abs(lhs.amplitude[i]));
    }
    CHECK(max_diff < 1e-12 * peak);
}

TEST_CASE("guard band suppresses wrap-around") {
    // A spot near the edge wraps on the periodic grid; the guard band frees it.
    const Grid grid = make_grid(128, 128, 8e-6, 633e-9);
    const Field f = gaussian_spot(grid, 40e-6, {0.35e-3, 0.0});
    const double z = 0.06;
    const Field wrapped = propagate(f, z);
    const Field guarded = propagate(f, z, 2);
    // Compare against the same propagation on a natively larger grid.
    const Grid big = make_grid(256, 256, 8e-6, 633e-9);
    const Field fb = gaussian_spot(big, 40e-6, {0.35e-3, 0.0});
    const Field ref_big = propagate(fb, z);
    Field ref(grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            ref.at(iy, ix) = ref_big.at(iy + 64, ix + 64);
        }
    }
    double err_guarded = 0.0, err_wrapped = 0.0;
    for (size_t i = 0; i < ref.amplitude.size(); ++i) {
        err_guarded += std::norm(guarded.amplitude[i] - ref.amplitude[i]);
        err_wrapped += std::norm(wrapped.amplitude[i] - ref.amplitude[i]);
    }
    CHECK(err_guarded < err_wrapped);
    CHECK(std::sqrt(err_guarded * grid.cell_area()) < 1e-6);
}

TEST_CASE("propagate rejects bad arguments") {
    const Field f = hermite_gaussian(kGrid, 0, 0, 100e-6);
    CHECK_THROWS_AS(propagate(f, 0.01, 0), InvalidArgument);
    CHECK_THROWS_AS(make_kernel(kGrid, std::nan("")), InvalidArgument);
}

TEST_CASE("evanescent components are zeroed on sub-wavelength grids") {
    // Pitch below lambda/2 pushes the grid corners past the propagation
    // circle; those components must vanish rather than blow up backward.
    const Grid fine = make_grid(32, 32, 3e-7, 633e-9);
    const SpectralKernel k = make_kernel(fine, 5e-6);
    size_t evanescent_count = 0;
    for (size_t i = 0; i < k.factors.size(); ++i) {
        if (k.evanescent[i]) {
            ++evanescent_count;
            CHECK(std::abs(k.factors[i]) == 0.0);
        } else {
            CHECK(std::abs(std::abs(k.factors[i]) - 1.0) < 1e-15);
        }
    }
    CHECK(evanescent_count > 0);

    // propagate(a) then propagate(-a) acts as the projection onto the
    // propagating subspace: idempotent after the first round trip.
    Field f(fine);
    for (int iy = 0; iy < fine.ny; ++iy) {
        for (int ix = 0; ix < fine.nx; ++ix) {
            f.at(iy, ix) = Complex{double((ix * 7 + iy * 3) % 5) - 2.0,
                                   double((ix + 2 * iy) % 3) - 1.0};
        }
    }
    const Field once = propagate(propagate(f, 5e-6), -5e-6);
    const Field twice = propagate(propagate(once, 5e-6), -5e-6);
    double err = 0.0;
    for (size_t i = 0; i < once.amplitude.size(); ++i) {
        err = std::max(err, std::abs(once.amplitude[i] - twice.amplitude[i]));
    }
    CHECK(err < 1e-12);
}
