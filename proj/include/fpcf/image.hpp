#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace fpcf {

// 8-bit grayscale raster held as doubles in [0, 255], row-major.
struct GrayImage {
    int rows = 0;
    int cols = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int r, int c, double fill = 0.0)
        : rows(r), cols(c), pixels(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}

    double& at(int r, int c) { return pixels[static_cast<size_t>(r) * cols + c]; }
    const double& at(int r, int c) const { return pixels[static_cast<size_t>(r) * cols + c]; }
};

// Horizontal band of a normalized face; strip_cols == 0 means "full width".
struct StripSpec {
    int row_start = 0;
    int strip_rows = 50;
    int strip_cols = 0;
};

inline Matrix to_matrix(const GrayImage& img) {
    Matrix m(img.rows, img.cols);
    m.data = img.pixels;
    return m;
}

namespace detail {

inline bool is_pgm_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string pgm_token(const std::string& bytes, size_t& pos, const std::string& path) {
    while (pos < bytes.size()) {
        if (is_pgm_space(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size()) throw parse_error(path + ": unexpected end of file in header");
    const size_t start = pos;
    while (pos < bytes.size() && !is_pgm_space(bytes[pos]) && bytes[pos] != '#') ++pos;
    return bytes.substr(start, pos - start);
}

inline int pgm_int(const std::string& bytes, size_t& pos, const std::string& path,
                   const char* what) {
    const std::string tok = pgm_token(bytes, pos, path);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw parse_error(path + ": bad " + what + " token '" + tok + "'");
    if (tok.size() > 9) throw parse_error(path + ": " + what + " token '" + tok + "' out of range");
    return std::stoi(tok);
}

} // namespace detail

// Loads a P2 (ASCII) or P5 (binary) portable graymap with maxval <= 255.
// Sample values are taken as-is; no rescaling to the maxval.
inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open PGM file: " + path);
    in.seekg(0, std::ios::end);
    std::string bytes(static_cast<size_t>(in.tellg()), '\0');
    in.seekg(0, std::ios::beg);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw io_error("failed reading PGM file: " + path);

    size_t pos = 0;
    const std::string magic = detail::pgm_token(bytes, pos, path);
    if (magic != "P2" && magic != "P5")
        throw parse_error(path + ": unsupported PGM magic '" + magic + "'");

    const int cols = detail::pgm_int(bytes, pos, path, "width");
    const int rows = detail::pgm_int(bytes, pos, path, "height");
    const int maxval = detail::pgm_int(bytes, pos, path, "maxval");
    if (cols < 1 || rows < 1)
        throw parse_error(path + ": non-positive image dimensions " + std::to_string(cols) +
                          "x" + std::to_string(rows));
    if (maxval < 1) throw parse_error(path + ": bad maxval " + std::to_string(maxval));
    if (maxval > 255)
        throw parse_error(path + ": unsupported depth, maxval " + std::to_string(maxval) +
                          " exceeds 255");

    GrayImage img(rows, cols);
    const size_t count = img.pixels.size();

    if (magic == "P5") {
        if (pos >= bytes.size() || !detail::is_pgm_space(bytes[pos]))
            throw parse_error(path + ": missing whitespace after maxval");
        ++pos; // exactly one whitespace byte separates header and raster
        if (bytes.size() - pos < count)
            throw parse_error(path + ": truncated pixel data, expected " +
                              std::to_string(count) + " bytes, got " +
                              std::to_string(bytes.size() - pos));
        for (size_t i = 0; i < count; ++i) {
            const unsigned char v = static_cast<unsigned char>(bytes[pos + i]);
            if (v > maxval)
                throw parse_error(path + ": sample " + std::to_string(v) +
                                  " exceeds maxval " + std::to_string(maxval));
            img.pixels[i] = static_cast<double>(v);
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            const int v = detail::pgm_int(bytes, pos, path, "sample");
            if (v > maxval)
                throw parse_error(path + ": sample " + std::to_string(v) +
                                  " exceeds maxval " + std::to_string(maxval));
            img.pixels[i] = static_cast<double>(v);
        }
    }
    return img;
}

// Writes a PGM with maxval 255; values are rounded and clamped to [0, 255].
inline void save_pgm(const GrayImage& img, const std::string& path, bool binary = true) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open PGM file for writing: " + path);
    out << (binary ? "P5" : "P2") << "\n" << img.cols << " " << img.rows << "\n255\n";
    if (binary) {
        std::string raster(img.pixels.size(), '\0');
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            const double v = std::lround(img.pixels[i]);
            raster[i] = static_cast<char>(static_cast<uint8_t>(std::clamp(v, 0.0, 255.0)));
        }
        out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    } else {
        for (int r = 0; r < img.rows; ++r) {
            for (int c = 0; c < img.cols; ++c) {
                const double v = std::lround(img.at(r, c));
                out << static_cast<int>(std::clamp(v, 0.0, 255.0)) << (c + 1 == img.cols ? "" : " ");
            }
            out << "\n";
        }
    }
    if (!out) throw io_error("failed writing PGM file: " + path);
}

// Corner-aligned bilinear resampling: output corners coincide with input
// corners, interior samples interpolate the four surrounding pixels.
inline GrayImage resize_bilinear(const GrayImage& img, int target_rows, int target_cols) {
    if (target_rows < 1 || target_cols < 1)
        throw std::invalid_argument("resize_bilinear: target " + std::to_string(target_rows) +
                                    "x" + std::to_string(target_cols) + " must be positive");
    if (img.rows < 1 || img.cols < 1)
        throw std::invalid_argument("resize_bilinear: empty source image");

    GrayImage out(target_rows, target_cols);
    const double sr = target_rows > 1 ? double(img.rows - 1) / double(target_rows - 1) : 0.0;
    const double sc = target_cols > 1 ? double(img.cols - 1) / double(target_cols - 1) : 0.0;

    for (int i = 0; i < target_rows; ++i) {
        const double fr = i * sr;
        const int r0 = static_cast<int>(fr);
        const int r1 = std::min(r0 + 1, img.rows - 1);
        const double wr = fr - r0;
        for (int j = 0; j < target_cols; ++j) {
            const double fc = j * sc;
            const int c0 = static_cast<int>(fc);
            const int c1 = std::min(c0 + 1, img.cols - 1);
            const double wc = fc - c0;
            const double top = img.at(r0, c0) * (1.0 - wc) + img.at(r0, c1) * wc;
            const double bot = img.at(r1, c0) * (1.0 - wc) + img.at(r1, c1) * wc;
            out.at(i, j) = std::clamp(top * (1.0 - wr) + bot * wr, 0.0, 255.0);
        }
    }
    return out;
}

// Copies the strip_rows x strip_cols band starting at (row_start, 0).
inline GrayImage crop_strip(const GrayImage& face, const StripSpec& spec) {
    const int cols = spec.strip_cols > 0 ? spec.strip_cols : face.cols;
    if (spec.row_start < 0)
        throw std::invalid_argument("crop_strip: row_start " + std::to_string(spec.row_start) +
                                    " is negative");
    if (spec.strip_rows < 1)
        throw std::invalid_argument("crop_strip: strip_rows must be positive");
    if (spec.row_start + spec.strip_rows > face.rows)
        throw std::invalid_argument("crop_strip: row_start + strip_rows = " +
                                    std::to_string(spec.row_start + spec.strip_rows) +
                                    " exceeds face rows " + std::to_string(face.rows));
    if (cols > face.cols)
        throw std::invalid_argument("crop_strip: strip_cols " + std::to_string(cols) +
                                    " exceeds face cols " + std::to_string(face.cols));

    GrayImage out(spec.strip_rows, cols);
    for (int r = 0; r < spec.strip_rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.at(r, c) = face.at(r + spec.row_start, c);
    return out;
}

} // namespace fpcf
