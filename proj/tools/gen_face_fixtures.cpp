// Generates the synthetic three-face image set used by the image-sorting
// demo: smiley, sad, and neutral faces sharing eyes and outline, with
// disjoint mouths. The common/mouth amplitude ratio is tuned so that the
// pairwise squared overlap of the amplitude images is 0.34.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "usdmplc/io.hpp"

namespace {

constexpr int kSize = 128;

using Buffer = std::vector<double>;

double& px(Buffer& b, int x, int y) { return b[static_cast<size_t>(y) * kSize + x]; }

void draw_disk(Buffer& b, double cx, double cy, double radius) {
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= radius * radius) px(b, x, y) = 1.0;
        }
    }
}

void draw_ring(Buffer& b, double cx, double cy, double radius, double half_width) {
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) {
            const double r = std::hypot(x - cx, y - cy);
            if (std::abs(r - radius) <= half_width) px(b, x, y) = 1.0;
        }
    }
}

void draw_arc(Buffer& b, double cx, double cy, double radius, double half_width, double y_min,
              double y_max) {
    for (int y = 0; y < kSize; ++y) {
        if (y < y_min || y > y_max) continue;
        for (int x = 0; x < kSize; ++x) {
            const double r = std::hypot(x - cx, y - cy);
            if (std::abs(r - radius) <= half_width) px(b, x, y) = 1.0;
        }
    }
}

void draw_bar(Buffer& b, int x0, int x1, int y0, int y1) {
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) px(b, x, y) = 1.0;
}

Buffer blur(const Buffer& src, double sigma) {
    const int half = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        kernel[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + half];
    }
    for (double& k : kernel) k /= sum;

    Buffer tmp(src.size(), 0.0), out(src.size(), 0.0);
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                const int xx = std::clamp(x + i, 0, kSize - 1);
                acc += kernel[i + half] * src[static_cast<size_t>(y) * kSize + xx];
            }
            tmp[static_cast<size_t>(y) * kSize + x] = acc;
        }
    }
    for (int y = 0; y < kSize; ++y) {
        for (int x = 0; x < kSize; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                const int yy = std::clamp(y + i, 0, kSize - 1);
                acc += kernel[i + half] * tmp[static_cast<size_t>(yy) * kSize + x];
            }
            out[static_cast<size_t>(y) * kSize + x] = acc;
        }
    }
    return out;
}

double energy(const Buffer& b) {
    double acc = 0.0;
    for (double v : b) acc += v * v;
    return acc;
}

double dot(const Buffer& a, const Buffer& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double mean_pairwise_fidelity(const Buffer& common, const std::vector<Buffer>& mouths,
                              double scale) {
    std::vector<Buffer> faces;
    for (const Buffer& m : mouths) {
        Buffer f = common;
        for (size_t i = 0; i < f.size(); ++i) f[i] += scale * m[i];
        faces.push_back(std::move(f));
    }
    double mean = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < faces.size(); ++i) {
        for (size_t j = i + 1; j < faces.size(); ++j) {
            const double overlap =
                dot(faces[i], faces[j]) / std::sqrt(energy(faces[i]) * energy(faces[j]));
            mean += overlap * overlap;
            ++pairs;
        }
    }
    return mean / pairs;
}

void write_pgm16(const Buffer& b, const std::filesystem::path& path) {
    double peak = 0.0;
    for (double v : b) peak = std::max(peak, v);
    std::string out = "P5\n" + std::to_string(kSize) + " " + std::to_string(kSize) + "\n65535\n";
    for (double v : b) {
        const int q = std::clamp(static_cast<int>(std::lround(v / peak * 65535.0)), 0, 65535);
        out += static_cast<char>((q >> 8) & 0xff);
        out += static_cast<char>(q & 0xff);
    }
    usdmplc::write_text_file(path, out);
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "tests/data/faces";
    std::filesystem::create_directories(dir);

    Buffer common(kSize * kSize, 0.0);
    draw_ring(common, 64, 64, 52, 1.5);
    draw_disk(common, 46, 48, 6);
    draw_disk(common, 82, 48, 6);

    // Mouths occupy disjoint row bands so the cross terms stay negligible.
    Buffer smile(kSize * kSize, 0.0), sad(kSize * kSize, 0.0), neutral(kSize * kSize, 0.0);
    draw_arc(smile, 64, 66, 24, 1.5, 78, 92);    // bulges downward
    draw_arc(sad, 64, 122, 24, 1.5, 96, 110);    // bulges upward
    draw_bar(neutral, 50, 78, 70, 74);

    const Buffer common_s = blur(common, 1.2);
    std::vector<Buffer> mouths = {blur(smile, 1.2), blur(sad, 1.2), blur(neutral, 1.2)};

    // Equalize mouth energies so the three pairwise fidelities coincide.
    double e_mean = 0.0;
    for (const Buffer& m : mouths) e_mean += energy(m);
    e_mean /= mouths.size();
    for (Buffer& m : mouths) {
        const double s = std::sqrt(e_mean / energy(m));
        for (double& v : m) v *= s;
    }

    // Bisect the mouth amplitude for mean pairwise fidelity 0.34.
    const double target = 0.34;
    double lo = 0.05, hi = 20.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean_pairwise_fidelity(common_s, mouths, mid) > target) {
            lo = mid;  // more mouth -> less overlap
        } else {
            hi = mid;
        }
    }
    const double scale = 0.5 * (lo + hi);

    const char* names[3] = {"smiley", "sad", "neutral"};
    for (int k = 0; k < 3; ++k) {
        Buffer face = common_s;
        for (size_t i = 0; i < face.size(); ++i) face[i] += scale * mouths[k][i];
        write_pgm16(face, dir / (std::string(names[k]) + ".pgm"));
    }
    std::cout << "mouth scale " << scale << ", mean fidelity "
              << mean_pairwise_fidelity(common_s, mouths, scale) << "\n";
    return 0;
}
