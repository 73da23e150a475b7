#include "usdmplc/modes.hpp"

#include <cmath>
#include <numbers>

#include "usdmplc/errors.hpp"

namespace usdmplc {

namespace {

constexpr double kPi = std::numbers::pi;

void guard(bool ok, const std::string& message, const ModeOptions& opts) {
    if (ok) return;
    if (opts.strict) throw InvalidArgument(message);
    if (opts.warnings) opts.warnings->push_back(message);
}

// Normalized 1D Hermite functions h_k(t) = H_k(t) exp(-t^2/2) / sqrt(2^k k! sqrt(pi))
// evaluated with the stable three-term recurrence. values[k][i] for t = ts[i].
std::vector<std::vector<double>> hermite_functions(const std::vector<double>& ts, int max_order) {
    std::vector<std::vector<double>> h(max_order + 1, std::vector<double>(ts.size()));
    const double c0 = std::pow(kPi, -0.25);
    for (size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        const double g = c0 * std::exp(-0.5 * t * t);
        h[0][i] = g;
        if (max_order >= 1) h[1][i] = std::sqrt(2.0) * t * g;
        for (int k = 1; k < max_order; ++k) {
            h[k + 1][i] =
                std::sqrt(2.0 / (k + 1)) * t * h[k][i] - std::sqrt(double(k) / (k + 1)) * h[k - 1][i];
        }
    }
    return h;
}

}  // namespace

Field hermite_gaussian(const Grid& grid, int m, int n, double waist, ModeOptions opts) {
    if (m < 0 || n < 0) throw InvalidArgument("hermite_gaussian: mode indices must be >= 0");
    if (!(waist > 0.0)) throw InvalidArgument("hermite_gaussian: waist must be positive");
    guard(waist >= 4.0 * grid.pitch,
          "hermite_gaussian: waist under 4 pixels is poorly resolved", opts);
    guard(std::min(grid.extent_x(), grid.extent_y()) >= 6.0 * waist,
          "hermite_gaussian: grid extent under 6 waists truncates the mode", opts);

    // u_k(x) = 2^(1/4)/sqrt(w) * h_k(sqrt(2) x / w); HG_mn = u_m(x) u_n(y).
    const double scale = std::pow(2.0, 0.25) / std::sqrt(waist);
    std::vector<double> tx(grid.nx), ty(grid.ny);
    for (int ix = 0; ix < grid.nx; ++ix) tx[ix] = std::sqrt(2.0) * grid.x(ix) / waist;
    for (int iy = 0; iy < grid.ny; ++iy) ty[iy] = std::sqrt(2.0) * grid.y(iy) / waist;
    const auto hx = hermite_functions(tx, m);
    const auto hy = hermite_functions(ty, n);

    Field f(grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double uy = scale * hy[n][iy];
        for (int ix = 0; ix < grid.nx; ++ix) {
            f.at(iy, ix) = scale * hx[m][ix] * uy;
        }
    }
    return f;
}

Field gaussian_spot(const Grid& grid, double waist, Point2 center, ModeOptions opts) {
    if (!(waist > 0.0)) throw InvalidArgument("gaussian_spot: waist must be positive");
    const double hx = 0.5 * grid.extent_x();
    const double hy = 0.5 * grid.extent_y();
    if (!(std::abs(center.x) < hx - grid.pitch && std::abs(center.y) < hy - grid.pitch)) {
        throw InvalidArgument("gaussian_spot: center must lie strictly inside the grid");
    }
    guard(waist >= 4.0 * grid.pitch, "gaussian_spot: waist under 4 pixels is poorly resolved",
          opts);
    const double margin = std::min({hx - std::abs(center.x), hy - std::abs(center.y)});
    guard(margin >= 3.0 * waist, "gaussian_spot: spot closer than 3 waists to the grid edge",
          opts);

    const double amp = std::sqrt(2.0 / kPi) / waist;
    const double inv_w2 = 1.0 / (waist * waist);
    Field f(grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double dy = grid.y(iy) - center.y;
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double dx = grid.x(ix) - center.x;
            f.at(iy, ix) = amp * std::exp(-(dx * dx + dy * dy) * inv_w2);
        }
    }
    return f;
}

std::vector<Point2> spot_layout(int count, double radius, Point2 center) {
    if (count < 1) throw InvalidArgument("spot_layout: count must be >= 1");
    if (radius < 0.0) throw InvalidArgument("spot_layout: radius must be >= 0");
    std::vector<Point2> pts(count);
    for (int k = 0; k < count; ++k) {
        const double angle = 0.5 * kPi + 2.0 * kPi * k / count;
        pts[k] = {center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
    }
    return pts;
}

ModeBasis hg_family(const Grid& grid, int order, double waist, ModeOptions opts) {
    if (order < 0) throw InvalidArgument("hg_family: order must be >= 0");
    ModeBasis basis;
    for (int m = 0; m <= order; ++m) {
        const int n = order - m;
        basis.modes.push_back(hermite_gaussian(grid, m, n, waist, opts));
        basis.labels.push_back("HG(" + std::to_string(m) + "," + std::to_string(n) + ")");
    }
    return basis;
}

Field superpose(const StateVec& coeffs, const ModeBasis& basis) {
    if (static_cast<size_t>(coeffs.size()) != basis.size()) {
        throw InvalidArgument("superpose: coefficient count does not match basis size");
    }
    if (basis.size() == 0) throw InvalidArgument("superpose: empty basis");
    Field out(basis.modes.front().grid);
    for (size_t k = 0; k < basis.size(); ++k) {
        if (!(basis.modes[k].grid == out.grid)) {
            throw InvalidArgument("superpose: basis modes live on different grids");
        }
        const Complex c = coeffs[static_cast<Eigen::Index>(k)];
        const auto& src = basis.modes[k].amplitude;
        for (size_t i = 0; i < src.size(); ++i) out.amplitude[i] += c * src[i];
    }
    return out;
}

}  // namespace usdmplc
