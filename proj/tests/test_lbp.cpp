#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include <fpcf/lbp.hpp>
#include <fpcf/synth.hpp>

#include "helpers.hpp"

using fpcf::CodeMap;
using fpcf::DescriptorConfig;
using fpcf::FeatureVector;
using fpcf::GrayImage;
using fpcf::Matrix;

TEST_CASE("lbp_code window cases") {
    SUBCASE("all-equal window gives 0 (strict inequality)") {
        std::array<double, 9> w;
        w.fill(42.0);
        CHECK(fpcf::lbp_code(w) == 0);
    }
    SUBCASE("center below all neighbors gives 255") {
        std::array<double, 9> w;
        w.fill(1.0);
        w[4] = 0.0;
        CHECK(fpcf::lbp_code(w) == 255);
    }
    SUBCASE("hand-evaluated mixed window") {
        // Rows (5,4,3 / 4,4,6 / 7,2,4), center 4. Clockwise from top-left
        // the neighbor diffs are (1,0,-1,2,0,-2,3,0): bits 0, 3 and 6.
        const std::array<double, 9> w = {5, 4, 3, 4, 4, 6, 7, 2, 4};
        CHECK(fpcf::lbp_code(w) == 1 + 8 + 64);
    }
}

TEST_CASE("lbp_map dimensions and constants") {
    SUBCASE("constant matrix maps to all-zero codes") {
        const CodeMap map = fpcf::lbp_map(Matrix(48, 43, 9.0));
        REQUIRE(map.rows == 46);
        REQUIRE(map.cols == 41);
        for (uint8_t code : map.codes) CHECK(code == 0);
    }
    SUBCASE("3x3 input gives a single cell") {
        Matrix m(3, 3, 0.0);
        m(0, 0) = 5.0;
        const CodeMap map = fpcf::lbp_map(m);
        CHECK(map.rows == 1);
        CHECK(map.cols == 1);
        CHECK(map.at(0, 0) == 1); // only the top-left neighbor exceeds the center
    }
    SUBCASE("too-small input is rejected") {
        CHECK_THROWS_AS(fpcf::lbp_map(Matrix(2, 9, 0.0)), std::invalid_argument);
    }
}

TEST_CASE("lbp_map matches the naive oracle bit-exactly") {
    fpcf::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix img = testutil::random_matrix(rng, 8, 8, 0.0, 255.0);
        int orows = 0, ocols = 0;
        const std::vector<int> expected = testutil::naive_lbp_map(img, orows, ocols);
        const CodeMap got = fpcf::lbp_map(img);
        REQUIRE(got.rows == orows);
        REQUIRE(got.cols == ocols);
        for (int i = 0; i < orows * ocols; ++i) CHECK(int(got.codes[i]) == expected[i]);
    }
}

TEST_CASE("lbp_map is invariant to gray-level shift and positive scale") {
    fpcf::Rng rng(12);
    const Matrix img = testutil::random_matrix(rng, 10, 12, 0.0, 255.0);
    const CodeMap base = fpcf::lbp_map(img);

    Matrix shifted = img;
    for (double& v : shifted.data) v += 31.25;
    CHECK(fpcf::lbp_map(shifted).codes == base.codes);

    Matrix scaled = img;
    for (double& v : scaled.data) v *= 2.75;
    CHECK(fpcf::lbp_map(scaled).codes == base.codes);
}

TEST_CASE("block_histograms dimension arithmetic") {
    fpcf::Rng rng(13);
    const Matrix img = testutil::random_matrix(rng, 48, 43, 0.0, 255.0);
    const CodeMap map = fpcf::lbp_map(img);
    CHECK(fpcf::block_histograms(map, 5).size() == 6400);
    CHECK(fpcf::block_histograms(map, 6).size() == 9216);
}

TEST_CASE("block_histograms counts directly on a tiny map") {
    CodeMap map(2, 2);
    map.codes = {0, 1, 2, 3};
    const FeatureVector hist = fpcf::block_histograms(map, 1);
    REQUIRE(hist.size() == 256);
    CHECK(hist[0] == 1.0);
    CHECK(hist[1] == 1.0);
    CHECK(hist[2] == 1.0);
    CHECK(hist[3] == 1.0);
    for (size_t i = 4; i < hist.size(); ++i) CHECK(hist[i] == 0.0);
}

TEST_CASE("block_histograms conserves counts and partitions cells") {
    fpcf::Rng rng(14);
    const Matrix img = testutil::random_matrix(rng, 25, 33, 0.0, 255.0);
    const CodeMap map = fpcf::lbp_map(img);

    for (int d : {1, 2, 3, 5, 7}) {
        const FeatureVector hist = fpcf::block_histograms(map, d);
        REQUIRE(hist.size() == size_t(d) * d * 256);
        const double total = std::accumulate(hist.begin(), hist.end(), 0.0);
        CHECK(total == double(map.rows) * map.cols);

        // Aggregating the d^2 block histograms must reproduce the d=1 histogram.
        const FeatureVector whole = fpcf::block_histograms(map, 1);
        std::vector<double> merged(256, 0.0);
        for (int b = 0; b < d * d; ++b)
            for (int bin = 0; bin < 256; ++bin) merged[bin] += hist[size_t(b) * 256 + bin];
        for (int bin = 0; bin < 256; ++bin) CHECK(merged[bin] == whole[bin]);
    }
}

TEST_CASE("block_histograms rejects oversized division counts") {
    CodeMap map(4, 9);
    CHECK_THROWS_AS(fpcf::block_histograms(map, 5), std::invalid_argument);
}

TEST_CASE("wd_lbp composes the stages") {
    fpcf::Rng rng(15);

    SUBCASE("150x130 face, levels=2, d=5 -> dim 6400") {
        GrayImage face(150, 130);
        for (double& p : face.pixels) p = rng.uniform(0.0, 255.0);
        const FeatureVector f = fpcf::wd_lbp(face, DescriptorConfig{5, fpcf::WaveletConfig{2}, true});
        CHECK(f.size() == 6400);
        const double total = std::accumulate(f.begin(), f.end(), 0.0);
        CHECK(total == 46.0 * 41.0); // level-2 face approx is 48x43
    }
    SUBCASE("50x130 strip, levels=2, d=9 -> dim 20736") {
        GrayImage strip(50, 130);
        for (double& p : strip.pixels) p = rng.uniform(0.0, 255.0);
        const FeatureVector f = fpcf::wd_lbp(strip, DescriptorConfig{9, fpcf::WaveletConfig{2}, true});
        CHECK(f.size() == size_t(9) * 9 * 256);
    }
    SUBCASE("constant image puts every block's mass in bin 0") {
        const GrayImage flat(150, 130, 55.0);
        const FeatureVector f = fpcf::wd_lbp(flat, DescriptorConfig{5, fpcf::WaveletConfig{2}, true});
        for (size_t b = 0; b < 25; ++b) {
            double block_total = 0.0;
            for (int bin = 0; bin < 256; ++bin) block_total += f[b * 256 + bin];
            CHECK(f[b * 256] == block_total);
            CHECK(block_total > 0.0);
        }
    }
    SUBCASE("plain-LBP baseline skips the wavelet stage") {
        GrayImage face(150, 130);
        for (double& p : face.pixels) p = rng.uniform(0.0, 255.0);
        const FeatureVector f = fpcf::wd_lbp(face, DescriptorConfig{12, fpcf::WaveletConfig{2}, false});
        CHECK(f.size() == size_t(12) * 12 * 256);
        const double total = std::accumulate(f.begin(), f.end(), 0.0);
        CHECK(total == 148.0 * 128.0);
    }
    SUBCASE("stage names appear in propagated errors") {
        const GrayImage tiny(15, 20, 0.0);
        CHECK_THROWS_WITH_AS(fpcf::wd_lbp(tiny, DescriptorConfig{1, fpcf::WaveletConfig{2}, true}),
                             doctest::Contains("wavelet stage"), std::invalid_argument);
        const GrayImage small(40, 40, 0.0);
        CHECK_THROWS_WITH_AS(fpcf::wd_lbp(small, DescriptorConfig{80, fpcf::WaveletConfig{1}, true}),
                             doctest::Contains("histogram stage"), std::invalid_argument);
    }
}
