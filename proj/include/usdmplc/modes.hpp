#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "usdmplc/field.hpp"

namespace usdmplc {

/// Abstract Hilbert-space vector (length d or d+1 in this codebase).
using StateVec = Eigen::VectorXcd;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Sampling-guard behaviour for mode generation. By default guard
/// violations (waist under 4 pixels, mode poorly contained in the grid)
/// are appended to `warnings` when a sink is provided; under strict mode
/// they throw InvalidArgument instead.
struct ModeOptions {
    bool strict = false;
    std::vector<std::string>* warnings = nullptr;
};

/// Normalized Hermite-Gaussian mode HG_{m,n} centered on the grid, with
/// physicists' Hermite polynomials and positive leading lobe toward +x/+y.
/// `waist` is the 1/e^2 intensity radius of the underlying Gaussian.
Field hermite_gaussian(const Grid& grid, int m, int n, double waist, ModeOptions opts = {});

/// Normalized Gaussian spot (HG_00 profile) displaced to `center`.
/// The center must lie strictly inside the grid.
Field gaussian_spot(const Grid& grid, double waist, Point2 center, ModeOptions opts = {});

/// `count` points equally spaced on a circle of radius `radius` around
/// `center`; the first point sits at 90 degrees and the sequence proceeds
/// counterclockwise.
std::vector<Point2> spot_layout(int count, double radius, Point2 center = {});

/// Ordered set of (nominally orthonormal) mode fields with labels.
struct ModeBasis {
    std::vector<Field> modes;
    std::vector<std::string> labels;

    size_t size() const { return modes.size(); }
};

/// HG modes with m + n = order, lexicographic in (m, n); order+1 modes.
ModeBasis hg_family(const Grid& grid, int order, double waist, ModeOptions opts = {});

/// sum_k coeffs[k] * basis[k]. Coefficient count must match the basis size.
Field superpose(const StateVec& coeffs, const ModeBasis& basis);

}  // namespace usdmplc
