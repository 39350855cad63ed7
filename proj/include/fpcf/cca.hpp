#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace fpcf {

enum class FusionMode : int { FFO1 = 1, FFO2 = 2 };

inline const char* to_string(FusionMode m) { return m == FusionMode::FFO1 ? "ffo1" : "ffo2"; }

// Canonical correlation model between two feature sets: centering means,
// canonical bases A and B, and the correlations of each variate pair.
struct CcaModel {
    std::vector<double> mean_x;        // length n1
    std::vector<double> mean_y;        // length n2
    Matrix basis_a;                    // n1 x k
    Matrix basis_b;                    // n2 x k
    std::vector<double> correlations;  // descending, k values
    double ridge = 0.0;

    int pairs() const { return basis_a.cols; }
};

struct FusedFeature {
    std::vector<double> values;
    FusionMode mode = FusionMode::FFO2;
};

namespace detail {

inline Matrix covariance(const Matrix& a_centered, const Matrix& b_centered) {
    // (1/N) A^T B for row-sample matrices sharing N rows.
    const int n = a_centered.rows;
    Matrix cov(a_centered.cols, b_centered.cols);
    for (int r = 0; r < n; ++r) {
        const double* ra = &a_centered.data[static_cast<size_t>(r) * a_centered.cols];
        const double* rb = &b_centered.data[static_cast<size_t>(r) * b_centered.cols];
        for (int i = 0; i < a_centered.cols; ++i) {
            const double v = ra[i];
            if (v == 0.0) continue;
            double* crow = &cov.data[static_cast<size_t>(i) * cov.cols];
            for (int j = 0; j < b_centered.cols; ++j) crow[j] += v * rb[j];
        }
    }
    for (double& v : cov.data) v /= n;
    return cov;
}

inline Matrix center_columns(const Matrix& m, std::vector<double>& mean_out) {
    mean_out.assign(m.cols, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        const double* row = &m.data[static_cast<size_t>(r) * m.cols];
        for (int c = 0; c < m.cols; ++c) mean_out[c] += row[c];
    }
    for (double& v : mean_out) v /= m.rows;
    Matrix centered(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            centered(r, c) = m(r, c) - mean_out[c];
    return centered;
}

} // namespace detail

// Fits CCA between X (N x n1) and Y (N x n2), both row-per-sample.
//
// The coupled eigenproblems
//   Cxx^-1 Cxy Cyy^-1 Cxy^T a = rho^2 a
//   Cyy^-1 Cxy^T Cxx^-1 Cxy b = rho^2 b
// are solved through the symmetric whitened form
//   Cxx^-1/2 Cxy Cyy^-1 Cxy^T Cxx^-1/2 w = rho^2 w,   a = Cxx^-1/2 w,
// with b recovered as Cyy^-1 Cxy^T a / rho. Both auto-covariances get a
// relative ridge, lambda * trace(C)/n * I, before inversion; the whitening
// also floors near-null eigendirections, so rank-deficient input degrades
// to a pseudo-inverse instead of blowing up.
//
// Canonical variates come out with unit training variance; each a column's
// largest-magnitude entry is positive, and b inherits a's sign. Pairs with
// rho <= rho_floor are dropped; max_pairs = -1 keeps all survivors.
inline CcaModel cca_fit(const Matrix& x, const Matrix& y, double ridge = 1e-8,
                        int max_pairs = -1, double rho_floor = 1e-6) {
    const int n = x.rows;
    if (y.rows != n)
        throw std::invalid_argument("cca_fit: X has " + std::to_string(n) + " rows, Y has " +
                                    std::to_string(y.rows));
    if (n < 3) throw std::invalid_argument("cca_fit: need at least 3 samples, got " + std::to_string(n));
    if (x.cols > n - 1 || y.cols > n - 1)
        throw std::invalid_argument("cca_fit: feature dimensions (" + std::to_string(x.cols) +
                                    ", " + std::to_string(y.cols) +
                                    ") violate the constraint n1, n2 <= N-1 with N = " +
                                    std::to_string(n));
    if (x.cols < 1 || y.cols < 1)
        throw std::invalid_argument("cca_fit: empty feature set");
    if (ridge < 0.0) throw std::invalid_argument("cca_fit: ridge must be nonnegative");
    for (double v : x.data)
        if (!std::isfinite(v)) throw data_error("cca_fit: non-finite value in X");
    for (double v : y.data)
        if (!std::isfinite(v)) throw data_error("cca_fit: non-finite value in Y");

    CcaModel model;
    model.ridge = ridge;
    const Matrix xc = detail::center_columns(x, model.mean_x);
    const Matrix yc = detail::center_columns(y, model.mean_y);

    Matrix cxx = detail::covariance(xc, xc);
    Matrix cyy = detail::covariance(yc, yc);
    const Matrix cxy = detail::covariance(xc, yc);

    if (ridge > 0.0) {
        double tx = 0.0;
        for (int i = 0; i < cxx.rows; ++i) tx += cxx(i, i);
        double ty = 0.0;
        for (int i = 0; i < cyy.rows; ++i) ty += cyy(i, i);
        const double dx = ridge * tx / cxx.rows;
        const double dy = ridge * ty / cyy.rows;
        for (int i = 0; i < cxx.rows; ++i) cxx(i, i) += dx;
        for (int i = 0; i < cyy.rows; ++i) cyy(i, i) += dy;
    }

    const Matrix wx = sym_pow(cxx, -0.5);
    const Matrix cyy_inv = sym_pow(cyy, -1.0);

    Matrix core = matmul(matmul(wx, cxy), matmul(cyy_inv, matmul(transpose(cxy), wx)));
    // Kill the asymmetry noise of the triple product before eigensolving.
    for (int i = 0; i < core.rows; ++i)
        for (int j = i + 1; j < core.cols; ++j) {
            const double s = 0.5 * (core(i, j) + core(j, i));
            core(i, j) = s;
            core(j, i) = s;
        }

    const EighResult eig = eigh(core);
    const Matrix cyy_inv_cyx = matmul(cyy_inv, transpose(cxy));

    int k = 0;
    const int k_max = std::min(x.cols, y.cols);
    for (int j = 0; j < static_cast<int>(eig.eigenvalues.size()); ++j) {
        if (k >= k_max) break;
        if (max_pairs != -1 && k >= max_pairs) break;
        const double rho = eig.eigenvalues[j] > 0.0 ? std::sqrt(eig.eigenvalues[j]) : 0.0;
        if (rho <= rho_floor) break;
        ++k;
    }

    model.basis_a = Matrix(x.cols, k);
    model.basis_b = Matrix(y.cols, k);
    model.correlations.resize(k);
    for (int j = 0; j < k; ++j) {
        const double rho = std::sqrt(eig.eigenvalues[j]);
        model.correlations[j] = rho;

        std::vector<double> w(core.rows);
        for (int i = 0; i < core.rows; ++i) w[i] = eig.eigenvectors(i, j);
        std::vector<double> a = matvec(wx, w);

        double best = 0.0;
        for (double v : a)
            if (std::abs(v) > std::abs(best)) best = v;
        const double sign = best < 0.0 ? -1.0 : 1.0;
        for (double& v : a) v *= sign;

        std::vector<double> b = matvec(cyy_inv_cyx, a);
        for (double& v : b) v /= rho;

        for (int i = 0; i < x.cols; ++i) model.basis_a(i, j) = a[i];
        for (int i = 0; i < y.cols; ++i) model.basis_b(i, j) = b[i];
    }
    return model;
}

namespace detail {

inline std::vector<double> project_centered(const Matrix& basis, const std::vector<double>& v,
                                            const std::vector<double>& mean, const char* side) {
    if (v.size() != mean.size())
        throw std::invalid_argument(std::string("fuse: ") + side + " length " +
                                    std::to_string(v.size()) + " does not match model dimension " +
                                    std::to_string(mean.size()));
    std::vector<double> centered(v.size());
    for (size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - mean[i];
    return matvec_trans(basis, centered);
}

} // namespace detail

// Fusion output 1: stacked canonical projections [A^T x_c ; B^T y_c], length 2k.
inline FusedFeature fuse_ffo1(const CcaModel& model, const std::vector<double>& x,
                              const std::vector<double>& y) {
    const std::vector<double> px = detail::project_centered(model.basis_a, x, model.mean_x, "x");
    const std::vector<double> py = detail::project_centered(model.basis_b, y, model.mean_y, "y");
    FusedFeature f;
    f.mode = FusionMode::FFO1;
    f.values.reserve(px.size() + py.size());
    f.values.insert(f.values.end(), px.begin(), px.end());
    f.values.insert(f.values.end(), py.begin(), py.end());
    return f;
}

// Fusion output 2: summed canonical projections A^T x_c + B^T y_c, length k.
inline FusedFeature fuse_ffo2(const CcaModel& model, const std::vector<double>& x,
                              const std::vector<double>& y) {
    const std::vector<double> px = detail::project_centered(model.basis_a, x, model.mean_x, "x");
    const std::vector<double> py = detail::project_centered(model.basis_b, y, model.mean_y, "y");
    FusedFeature f;
    f.mode = FusionMode::FFO2;
    f.values.resize(px.size());
    for (size_t i = 0; i < px.size(); ++i) f.values[i] = px[i] + py[i];
    return f;
}

inline FusedFeature fuse(const CcaModel& model, FusionMode mode, const std::vector<double>& x,
                         const std::vector<double>& y) {
    return mode == FusionMode::FFO1 ? fuse_ffo1(model, x, y) : fuse_ffo2(model, x, y);
}

} // namespace fpcf
