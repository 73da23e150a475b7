#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "usdmplc/experiment.hpp"
#include "usdmplc/field.hpp"
#include "usdmplc/mplc.hpp"

namespace usdmplc {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Field serialization: `<base>.re.csv` and `<base>.im.csv` (row-major,
/// comma-separated, shortest round-trip decimals) plus a `<base>.json`
/// sidecar carrying {nx, ny, pitch, wavelength}.
void save_field(const Field& field, const std::filesystem::path& base);
Field load_field(const std::filesystem::path& base);

/// Plain-text mask: one row of space-separated radians per grid row.
void write_mask_text(const std::vector<double>& mask, const Grid& grid,
                     const std::filesystem::path& path);
std::vector<double> read_mask_text(const Grid& grid, const std::filesystem::path& path);

/// 16-bit binary PGM with the linear map (-pi, pi] -> [0, 65535].
void write_mask_pgm(const std::vector<double>& mask, const Grid& grid,
                    const std::filesystem::path& path);
std::vector<double> read_mask_pgm(const Grid& grid, const std::filesystem::path& path);

/// Grayscale image loaded as nonnegative real amplitudes scaled to [0, 1].
/// Supports 8/16-bit PGM (P2/P5) and grayscale/RGB PNG (RGB uses luma).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  ///< row-major, [0, 1]
};
GrayImage load_gray_image(const std::filesystem::path& path);

/// Centers the image on the grid, one image pixel per grid pixel.
/// `pixels_are_intensity` takes the square root before embedding.
Field image_to_field(const GrayImage& image, const Grid& grid, bool pixels_are_intensity = false);

/// Matrix serialization helpers.
std::string outcome_matrix_csv(const OutcomeMatrix& m);
OutcomeMatrix outcome_matrix_from_csv(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace usdmplc
