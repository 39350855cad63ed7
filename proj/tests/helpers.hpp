#pragma once

// Test-only utilities and independent oracles. Nothing here may call into
// the library code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <fpcf/linalg.hpp>
#include <fpcf/synth.hpp>

namespace testutil {

inline fpcf::Matrix random_matrix(fpcf::Rng& rng, int rows, int cols, double lo = 0.0,
                                  double hi = 1.0) {
    fpcf::Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(lo, hi);
    return m;
}

inline std::vector<double> random_vector(fpcf::Rng& rng, int n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

// Naive per-pixel LBP, written directly from the code definition with no
// shared machinery: neighbors clockwise from top-left, bit i = 2^i,
// strictly-greater comparison.
inline std::vector<int> naive_lbp_map(const fpcf::Matrix& img, int& out_rows, int& out_cols) {
    static const int offs[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1},
                                   {1, 1},   {1, 0},  {1, -1}, {0, -1}};
    out_rows = img.rows - 2;
    out_cols = img.cols - 2;
    std::vector<int> codes;
    for (int r = 1; r < img.rows - 1; ++r) {
        for (int c = 1; c < img.cols - 1; ++c) {
            int code = 0;
            for (int i = 0; i < 8; ++i) {
                const double neighbor = img(r + offs[i][0], c + offs[i][1]);
                if (neighbor - img(r, c) > 0.0) code += 1 << i;
            }
            codes.push_back(code);
        }
    }
    return codes;
}

// Gauss-Jordan inverse with partial pivoting; test-side route only.
inline fpcf::Matrix gj_inverse(const fpcf::Matrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("gj_inverse: not square");
    const int n = a.rows;
    fpcf::Matrix m = a;
    fpcf::Matrix inv = fpcf::Matrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
        if (std::abs(m(pivot, col)) < 1e-300) throw std::runtime_error("gj_inverse: singular");
        if (pivot != col)
            for (int c = 0; c < n; ++c) {
                std::swap(m(pivot, c), m(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        const double p = m(col, col);
        for (int c = 0; c < n; ++c) {
            m(col, c) /= p;
            inv(col, c) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m(r, col);
            if (f == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                m(r, c) -= f * m(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

// Eigenvalues of a general real matrix with real nonnegative spectrum via
// unshifted QR iteration (Gram-Schmidt QR). Slow but independent of the
// library's Jacobi/whitening path. Returns eigenvalues descending.
inline std::vector<double> qr_eigenvalues(fpcf::Matrix a, int iterations = 2000) {
    if (a.rows != a.cols) throw std::invalid_argument("qr_eigenvalues: not square");
    const int n = a.rows;
    for (int it = 0; it < iterations; ++it) {
        // Modified Gram-Schmidt QR: A = QR.
        fpcf::Matrix q(n, n), r(n, n);
        for (int j = 0; j < n; ++j) {
            std::vector<double> v(n);
            for (int i = 0; i < n; ++i) v[i] = a(i, j);
            for (int k = 0; k < j; ++k) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += q(i, k) * v[i];
                r(k, j) = s;
                for (int i = 0; i < n; ++i) v[i] -= s * q(i, k);
            }
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += v[i] * v[i];
            norm = std::sqrt(norm);
            r(j, j) = norm;
            if (norm < 1e-300) {
                for (int i = 0; i < n; ++i) q(i, j) = i == j ? 1.0 : 0.0;
            } else {
                for (int i = 0; i < n; ++i) q(i, j) = v[i] / norm;
            }
        }
        a = fpcf::matmul(r, q);
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Fresh scratch directory under the test binary's working directory.
inline std::string scratch_dir(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path("scratch") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

} // namespace testutil
