#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpcf {

// Dense row-major matrix of doubles. Small sizes only: the heaviest use in
// this library is an M x M Gram matrix where M is the training-set size.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative dimension");
    }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const double& operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool empty() const { return rows == 0 || cols == 0; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < a.cols; ++c)
            t(c, r) = a(r, c);
    return t;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols) +
                                    " and " + std::to_string(b.rows) + " do not match");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
            double* crow = &c.data[static_cast<size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (a.cols != static_cast<int>(x.size()))
        throw std::invalid_argument("matvec: matrix has " + std::to_string(a.cols) +
                                    " cols, vector has " + std::to_string(x.size()));
    std::vector<double> y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* row = &a.data[static_cast<size_t>(i) * a.cols];
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

// y = A^T x without forming the transpose.
inline std::vector<double> matvec_trans(const Matrix& a, const std::vector<double>& x) {
    if (a.rows != static_cast<int>(x.size()))
        throw std::invalid_argument("matvec_trans: matrix has " + std::to_string(a.rows) +
                                    " rows, vector has " + std::to_string(x.size()));
    std::vector<double> y(a.cols, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        const double* row = &a.data[static_cast<size_t>(i) * a.cols];
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < a.cols; ++j) y[j] += row[j] * xi;
    }
    return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_distance: length mismatch " +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

struct EighResult {
    std::vector<double> eigenvalues; // descending
    Matrix eigenvectors;             // columns match eigenvalues
};

// Cyclic Jacobi eigensolver for symmetric matrices. Deterministic sweep
// order, eigenpairs returned in descending eigenvalue order.
inline EighResult eigh(const Matrix& sym) {
    if (sym.rows != sym.cols)
        throw std::invalid_argument("eigh: matrix is " + std::to_string(sym.rows) + "x" +
                                    std::to_string(sym.cols) + ", expected square");
    const int n = sym.rows;
    Matrix a = sym;
    Matrix v = Matrix::identity(n);

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tol = (scale > 0.0 ? scale : 1.0) * 1e-14;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tol) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol * 1e-2) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) > a(j, j); });

    EighResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        res.eigenvalues[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) res.eigenvectors(i, j) = v(i, order[j]);
    }
    return res;
}

// Spectral power of a symmetric PSD matrix: Q diag(lambda^p) Q^T.
// Eigenvalues at or below rel_floor * lambda_max contribute zero, so
// negative powers act as pseudo-inverses on rank-deficient input.
inline Matrix sym_pow(const Matrix& sym, double power, double rel_floor = 1e-12) {
    const EighResult e = eigh(sym);
    const int n = sym.rows;
    const double lmax = e.eigenvalues.empty() ? 0.0 : std::max(0.0, e.eigenvalues.front());
    const double floor_val = lmax * rel_floor;
    Matrix scaled(n, n);
    for (int j = 0; j < n; ++j) {
        const double lam = e.eigenvalues[j];
        const double f = (lam > floor_val && lam > 0.0) ? std::pow(lam, power) : 0.0;
        for (int i = 0; i < n; ++i) scaled(i, j) = e.eigenvectors(i, j) * f;
    }
    return matmul(scaled, transpose(e.eigenvectors));
}

} // namespace fpcf
