#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace fpcf {

// Mean feature plus orthonormal eigenbasis of the training covariance.
struct PcaModel {
    std::vector<double> mean;        // length dim
    Matrix basis;                    // dim x components, orthonormal columns
    std::vector<double> eigenvalues; // descending, >= 0

    int dim() const { return static_cast<int>(mean.size()); }
    int components() const { return basis.cols; }
};

// Fits PCA over feature rows via the M x M Gram matrix rather than the
// dim x dim covariance (dim is typically thousands, M at most a few
// hundred). Covariance uses 1/M normalization. Components with eigenvalue
// at or below 1e-12 of the largest are dropped; at most M-1 survive.
// keep = -1 retains everything above the floor.
inline PcaModel pca_fit(const Matrix& features, int keep = -1) {
    const int m = features.rows;
    const int dim = features.cols;
    if (m < 2)
        throw std::invalid_argument("pca_fit: need at least 2 training features, got " +
                                    std::to_string(m));
    if (keep != -1 && (keep < 0 || keep > m - 1))
        throw std::invalid_argument("pca_fit: keep = " + std::to_string(keep) +
                                    " must lie in [0, M-1] = [0, " + std::to_string(m - 1) + "]");

    PcaModel model;
    model.mean.assign(dim, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* row = &features.data[static_cast<size_t>(i) * dim];
        for (int j = 0; j < dim; ++j) model.mean[j] += row[j];
    }
    for (int j = 0; j < dim; ++j) model.mean[j] /= m;

    Matrix centered(m, dim);
    for (int i = 0; i < m; ++i) {
        const double* row = &features.data[static_cast<size_t>(i) * dim];
        double* out = &centered.data[static_cast<size_t>(i) * dim];
        for (int j = 0; j < dim; ++j) out[j] = row[j] - model.mean[j];
    }

    Matrix gram(m, m);
    for (int i = 0; i < m; ++i) {
        const double* ri = &centered.data[static_cast<size_t>(i) * dim];
        for (int j = i; j < m; ++j) {
            const double* rj = &centered.data[static_cast<size_t>(j) * dim];
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += ri[k] * rj[k];
            s /= m;
            gram(i, j) = s;
            gram(j, i) = s;
        }
    }

    const EighResult eig = eigh(gram);
    const double lmax = eig.eigenvalues.empty() ? 0.0 : std::max(0.0, eig.eigenvalues.front());
    const double floor_val = lmax * 1e-12;

    int count = 0;
    const int cap = keep == -1 ? m - 1 : keep;
    for (int j = 0; j < m && count < cap; ++j) {
        if (eig.eigenvalues[j] > floor_val && eig.eigenvalues[j] > 0.0) ++count;
        else break;
    }

    model.basis = Matrix(dim, count);
    model.eigenvalues.resize(count);
    for (int j = 0; j < count; ++j) {
        const double lambda = eig.eigenvalues[j];
        model.eigenvalues[j] = lambda;
        // u = centered^T v, normalized: ||centered^T v||^2 = M * lambda.
        const double inv_norm = 1.0 / std::sqrt(double(m) * lambda);
        std::vector<double> u(dim, 0.0);
        for (int i = 0; i < m; ++i) {
            const double w = eig.eigenvectors(i, j) * inv_norm;
            if (w == 0.0) continue;
            const double* row = &centered.data[static_cast<size_t>(i) * dim];
            for (int k = 0; k < dim; ++k) u[k] += w * row[k];
        }
        // Deterministic sign: the largest-magnitude entry is positive.
        double best = 0.0;
        for (int k = 0; k < dim; ++k)
            if (std::abs(u[k]) > std::abs(best)) best = u[k];
        const double sign = best < 0.0 ? -1.0 : 1.0;
        for (int k = 0; k < dim; ++k) model.basis(k, j) = sign * u[k];
    }
    return model;
}

// Projection onto the eigenbasis: basis^T (feature - mean).
inline std::vector<double> pca_project(const PcaModel& model, const std::vector<double>& feature) {
    if (static_cast<int>(feature.size()) != model.dim())
        throw std::invalid_argument("pca_project: feature dim " + std::to_string(feature.size()) +
                                    " does not match model dim " + std::to_string(model.dim()));
    std::vector<double> centered(feature.size());
    for (size_t i = 0; i < feature.size(); ++i) centered[i] = feature[i] - model.mean[i];
    return matvec_trans(model.basis, centered);
}

} // namespace fpcf
