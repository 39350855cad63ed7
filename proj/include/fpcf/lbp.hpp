#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "image.hpp"
#include "linalg.hpp"
#include "wavelet.hpp"

namespace fpcf {

using FeatureVector = std::vector<double>;

// 8-bit LBP codes for the interior pixels of a source matrix:
// rows = source rows - 2, cols = source cols - 2.
struct CodeMap {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> codes;

    CodeMap() = default;
    CodeMap(int r, int c) : rows(r), cols(c), codes(static_cast<size_t>(r) * c, 0) {}

    uint8_t at(int r, int c) const { return codes[static_cast<size_t>(r) * cols + c]; }
};

struct DescriptorConfig {
    int divisions = 9;        // blocks per axis, d^2 total
    WaveletConfig wavelet{};  // used when use_wavelet is true
    bool use_wavelet = true;  // false = plain LBP baseline on the raw image
};

// Neighbor order is format-defining: persisted features depend on it.
// g_0..g_7 run clockwise from the top-left neighbor, bit i weighted 2^i:
//   (-1,-1) (-1,0) (-1,+1) (0,+1) (+1,+1) (+1,0) (+1,-1) (0,-1)
inline constexpr std::array<std::array<int, 2>, 8> kLbpNeighborOffsets = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1},
}};

// Code for one 3x3 window given row-major; center is element 4. A neighbor
// contributes its bit only when strictly greater than the center.
inline int lbp_code(const std::array<double, 9>& window) {
    const double center = window[4];
    int code = 0;
    for (int i = 0; i < 8; ++i) {
        const int r = kLbpNeighborOffsets[i][0] + 1;
        const int c = kLbpNeighborOffsets[i][1] + 1;
        if (window[static_cast<size_t>(r) * 3 + c] > center) code |= 1 << i;
    }
    return code;
}

// LBP code at every interior pixel.
inline CodeMap lbp_map(const Matrix& img) {
    if (img.rows < 3 || img.cols < 3)
        throw std::invalid_argument("lbp_map: input " + std::to_string(img.rows) + "x" +
                                    std::to_string(img.cols) + " is smaller than 3x3");
    CodeMap map(img.rows - 2, img.cols - 2);
    for (int r = 1; r + 1 < img.rows; ++r) {
        const double* above = &img.data[static_cast<size_t>(r - 1) * img.cols];
        const double* mid = &img.data[static_cast<size_t>(r) * img.cols];
        const double* below = &img.data[static_cast<size_t>(r + 1) * img.cols];
        uint8_t* out = &map.codes[static_cast<size_t>(r - 1) * map.cols];
        for (int c = 1; c + 1 < img.cols; ++c) {
            const double g = mid[c];
            int code = 0;
            code |= (above[c - 1] > g) << 0;
            code |= (above[c] > g) << 1;
            code |= (above[c + 1] > g) << 2;
            code |= (mid[c + 1] > g) << 3;
            code |= (below[c + 1] > g) << 4;
            code |= (below[c] > g) << 5;
            code |= (below[c - 1] > g) << 6;
            code |= (mid[c - 1] > g) << 7;
            out[c - 1] = static_cast<uint8_t>(code);
        }
    }
    return map;
}

// Concatenated raw-count 256-bin histograms over a d x d block grid.
// Block boundaries sit at round(k*n/d), so sizes differ by at most one
// cell and every cell is counted exactly once. Output dim = d*d*256.
inline FeatureVector block_histograms(const CodeMap& map, int d) {
    if (d < 1) throw std::invalid_argument("block_histograms: divisions must be >= 1");
    if (d > map.rows || d > map.cols)
        throw std::invalid_argument("block_histograms: divisions " + std::to_string(d) +
                                    " exceed code map " + std::to_string(map.rows) + "x" +
                                    std::to_string(map.cols));

    auto boundaries = [d](int n) {
        std::vector<int> b(static_cast<size_t>(d) + 1);
        for (int k = 0; k <= d; ++k)
            b[k] = static_cast<int>(std::lround(double(k) * n / d));
        return b;
    };
    const std::vector<int> rb = boundaries(map.rows);
    const std::vector<int> cb = boundaries(map.cols);

    FeatureVector hist(static_cast<size_t>(d) * d * 256, 0.0);
    for (int br = 0; br < d; ++br) {
        for (int bc = 0; bc < d; ++bc) {
            double* bins = &hist[(static_cast<size_t>(br) * d + bc) * 256];
            for (int r = rb[br]; r < rb[br + 1]; ++r)
                for (int c = cb[bc]; c < cb[bc + 1]; ++c)
                    bins[map.at(r, c)] += 1.0;
        }
    }
    return hist;
}

// Full descriptor: optional wavelet approximation, LBP map, block histograms.
inline FeatureVector wd_lbp(const GrayImage& img, const DescriptorConfig& cfg) {
    Matrix source = to_matrix(img);
    if (cfg.use_wavelet) {
        try {
            source = approx_level(source, cfg.wavelet);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("wd_lbp: wavelet stage: ") + e.what());
        }
    }
    CodeMap map;
    try {
        map = lbp_map(source);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("wd_lbp: lbp stage: ") + e.what());
    }
    try {
        return block_histograms(map, cfg.divisions);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("wd_lbp: histogram stage: ") + e.what());
    }
}

} // namespace fpcf
