#include "usdmplc/io.hpp"

#include <png.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "usdmplc/errors.hpp"

namespace usdmplc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double parse_double(std::string_view token, const char* where) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw IoError(std::string(where) + ": cannot parse number '" + std::string(token) + "'");
    }
    return value;
}

std::vector<double> parse_row(const std::string& line, char sep, const char* where) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= line.size()) {
        size_t next = line.find(sep, pos);
        if (next == std::string::npos) next = line.size();
        std::string_view token(line.data() + pos, next - pos);
        // tolerate stray whitespace around tokens
        while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
            token.remove_prefix(1);
        while (!token.empty() && (token.back() == ' ' || token.back() == '\r' ||
                                  token.back() == '\t'))
            token.remove_suffix(1);
        if (!token.empty()) out.push_back(parse_double(token, where));
        if (next == line.size()) break;
        pos = next + 1;
    }
    return out;
}

void write_component_csv(const Field& field, const std::filesystem::path& path, bool imag) {
    std::string out;
    out.reserve(field.amplitude.size() * 12);
    for (int iy = 0; iy < field.grid.ny; ++iy) {
        for (int ix = 0; ix < field.grid.nx; ++ix) {
            const Complex& a = field.at(iy, ix);
            out += format_double(imag ? a.imag() : a.real());
            out += ix + 1 == field.grid.nx ? '\n' : ',';
        }
    }
    write_text_file(path, out);
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_field(const Field& field, const std::filesystem::path& base) {
    write_component_csv(field, base.string() + ".re.csv", false);
    write_component_csv(field, base.string() + ".im.csv", true);
    nlohmann::json sidecar = {
        {"nx", field.grid.nx},
        {"ny", field.grid.ny},
        {"pitch", field.grid.pitch},
        {"wavelength", field.grid.wavelength},
    };
    write_text_file(base.string() + ".json", sidecar.dump(2) + "\n");
}

Field load_field(const std::filesystem::path& base) {
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_text_file(base.string() + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("field sidecar parse error at " + base.string() + ".json: " + e.what());
    }
    const Grid grid = make_grid(sidecar.at("nx").get<int>(), sidecar.at("ny").get<int>(),
                                sidecar.at("pitch").get<double>(),
                                sidecar.at("wavelength").get<double>());
    Field field(grid);

    for (const bool imag : {false, true}) {
        const auto path = base.string() + (imag ? ".im.csv" : ".re.csv");
        std::istringstream in(read_text_file(path));
        std::string line;
        int iy = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (iy >= grid.ny) throw IoError("too many rows in " + path);
            const auto row = parse_row(line, ',', "load_field");
            if (static_cast<int>(row.size()) != grid.nx) {
                throw IoError("row length mismatch in " + path);
            }
            for (int ix = 0; ix < grid.nx; ++ix) {
                Complex& a = field.at(iy, ix);
                a = imag ? Complex{a.real(), row[static_cast<size_t>(ix)]}
                         : Complex{row[static_cast<size_t>(ix)], a.imag()};
            }
            ++iy;
        }
        if (iy != grid.ny) throw IoError("too few rows in " + path);
    }
    return field;
}

void write_mask_text(const std::vector<double>& mask, const Grid& grid,
                     const std::filesystem::path& path) {
    if (mask.size() != static_cast<size_t>(grid.pixels())) {
        throw InvalidArgument("write_mask_text: mask size does not match the grid");
    }
    std::string out;
    out.reserve(mask.size() * 10);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            out += format_double(mask[static_cast<size_t>(iy) * grid.nx + ix]);
            out += ix + 1 == grid.nx ? '\n' : ' ';
        }
    }
    write_text_file(path, out);
}

std::vector<double> read_mask_text(const Grid& grid, const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<double> mask;
    mask.reserve(static_cast<size_t>(grid.pixels()));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto row = parse_row(line, ' ', "read_mask_text");
        if (static_cast<int>(row.size()) != grid.nx) {
            throw IoError("mask row length mismatch in " + path.string());
        }
        mask.insert(mask.end(), row.begin(), row.end());
    }
    if (mask.size() != static_cast<size_t>(grid.pixels())) {
        throw IoError("mask row count mismatch in " + path.string());
    }
    return mask;
}

void write_mask_pgm(const std::vector<double>& mask, const Grid& grid,
                    const std::filesystem::path& path) {
    if (mask.size() != static_cast<size_t>(grid.pixels())) {
        throw InvalidArgument("write_mask_pgm: mask size does not match the grid");
    }
    std::string out = "P5\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) +
                      "\n65535\n";
    out.reserve(out.size() + mask.size() * 2);
    for (double phi : mask) {
        const double unit = (wrap_phase(phi) + kPi) / (2.0 * kPi);  // (0, 1]
        const int v = std::clamp(static_cast<int>(std::lround(unit * 65535.0)), 0, 65535);
        out += static_cast<char>((v >> 8) & 0xff);  // PGM stores MSB first
        out += static_cast<char>(v & 0xff);
    }
    write_text_file(path, out);
}

std::vector<double> read_mask_pgm(const Grid& grid, const std::filesystem::path& path) {
    const std::string data = read_text_file(path);
    std::istringstream in(data);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || !in) throw IoError("not a binary PGM: " + path.string());
    if (w != grid.nx || h != grid.ny) throw IoError("PGM size mismatch: " + path.string());
    if (maxval != 65535) throw IoError("expected 16-bit PGM: " + path.string());
    in.get();  // single whitespace after maxval
    const size_t offset = static_cast<size_t>(in.tellg());
    const size_t need = static_cast<size_t>(grid.pixels()) * 2;
    if (data.size() < offset + need) throw IoError("truncated PGM: " + path.string());
    std::vector<double> mask(static_cast<size_t>(grid.pixels()));
    for (size_t i = 0; i < mask.size(); ++i) {
        const unsigned hi = static_cast<unsigned char>(data[offset + 2 * i]);
        const unsigned lo = static_cast<unsigned char>(data[offset + 2 * i + 1]);
        const unsigned v = (hi << 8) | lo;
        mask[i] = wrap_phase(v / 65535.0 * 2.0 * kPi - kPi);
    }
    return mask;
}

namespace {

GrayImage load_pgm(const std::string& data, const std::filesystem::path& path) {
    std::istringstream in(data);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (!in || w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw IoError("malformed PGM header: " + path.string());
    }
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<size_t>(w) * h);
    if (magic == "P2") {
        for (auto& px : img.pixels) {
            long v = 0;
            if (!(in >> v)) throw IoError("truncated ASCII PGM: " + path.string());
            px = static_cast<double>(v) / maxval;
        }
    } else if (magic == "P5") {
        in.get();
        const size_t offset = static_cast<size_t>(in.tellg());
        const int bytes = maxval > 255 ? 2 : 1;
        const size_t need = img.pixels.size() * static_cast<size_t>(bytes);
        if (data.size() < offset + need) throw IoError("truncated PGM: " + path.string());
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            unsigned v;
            if (bytes == 2) {
                const unsigned hi = static_cast<unsigned char>(data[offset + 2 * i]);
                const unsigned lo = static_cast<unsigned char>(data[offset + 2 * i + 1]);
                v = (hi << 8) | lo;
            } else {
                v = static_cast<unsigned char>(data[offset + i]);
            }
            img.pixels[i] = static_cast<double>(v) / maxval;
        }
    } else {
        throw IoError("unsupported PGM variant '" + magic + "': " + path.string());
    }
    return img;
}

GrayImage load_png(const std::filesystem::path& path) {
    FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw IoError("cannot open: " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("PNG decode error: " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (color & PNG_COLOR_MASK_COLOR) {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);  // default luma weights
    }
    png_read_update_info(png, info);

    const png_byte out_depth = png_get_bit_depth(png, info);
    const size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<png_byte> buffer(rowbytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buffer.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    GrayImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<size_t>(w) * h);
    const double maxval = out_depth == 16 ? 65535.0 : 255.0;
    for (png_uint_32 y = 0; y < h; ++y) {
        for (png_uint_32 x = 0; x < w; ++x) {
            unsigned v;
            if (out_depth == 16) {
                v = (static_cast<unsigned>(rows[y][2 * x]) << 8) | rows[y][2 * x + 1];
            } else {
                v = rows[y][x];
            }
            img.pixels[static_cast<size_t>(y) * w + x] = v / maxval;
        }
    }
    return img;
}

}  // namespace

GrayImage load_gray_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) throw IoError("no such file: " + path.string());
    const std::string data = read_text_file(path);
    if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '5')) {
        return load_pgm(data, path);
    }
    if (data.size() >= 8 && static_cast<unsigned char>(data[0]) == 0x89 && data[1] == 'P') {
        return load_png(path);
    }
    throw IoError("unsupported image format (expected PGM or PNG): " + path.string());
}

Field image_to_field(const GrayImage& image, const Grid& grid, bool pixels_are_intensity) {
    if (image.width > grid.nx || image.height > grid.ny) {
        throw InvalidArgument("image_to_field: image is larger than the grid");
    }
    const int ox = (grid.nx - image.width) / 2;
    const int oy = (grid.ny - image.height) / 2;
    Field f(grid);
    for (int iy = 0; iy < image.height; ++iy) {
        for (int ix = 0; ix < image.width; ++ix) {
            double v = image.pixels[static_cast<size_t>(iy) * image.width + ix];
            if (pixels_are_intensity) v = std::sqrt(v);
            f.at(iy + oy, ix + ox) = v;
        }
    }
    return f;
}

std::string outcome_matrix_csv(const OutcomeMatrix& m) {
    std::string out;
    if (!m.col_labels.empty()) {
        out += "input";
        for (const auto& label : m.col_labels) out += "," + label;
        out += '\n';
    }
    for (int i = 0; i < m.rows; ++i) {
        out += i < static_cast<int>(m.row_labels.size()) ? m.row_labels[static_cast<size_t>(i)]
                                                         : std::to_string(i + 1);
        for (int j = 0; j < m.cols; ++j) out += "," + format_double(m.at(i, j));
        out += '\n';
    }
    return out;
}

OutcomeMatrix outcome_matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> row_labels, col_labels;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw IoError("outcome_matrix_from_csv: malformed row");
        const std::string head = line.substr(0, comma);
        const std::string rest = line.substr(comma + 1);
        if (first) {
            first = false;
            // header row is optional; detect by a non-numeric first cell
            char* end = nullptr;
            std::strtod(head.c_str(), &end);
            const bool numeric_head = end != head.c_str() && *end == '\0';
            if (!numeric_head && head == "input") {
                std::istringstream hs(rest);
                std::string token;
                while (std::getline(hs, token, ',')) col_labels.push_back(token);
                continue;
            }
        }
        row_labels.push_back(head);
        rows.push_back(parse_row(rest, ',', "outcome_matrix_from_csv"));
    }
    if (rows.empty()) throw IoError("outcome_matrix_from_csv: no data rows");
    OutcomeMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    m.row_labels = std::move(row_labels);
    m.col_labels = std::move(col_labels);
    for (int i = 0; i < m.rows; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != m.cols) {
            throw IoError("outcome_matrix_from_csv: ragged rows");
        }
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    return m;
}

}  // namespace usdmplc
