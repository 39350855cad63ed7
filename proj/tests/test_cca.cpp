#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <fpcf/cca.hpp>
#include <fpcf/synth.hpp>

#include "helpers.hpp"

using fpcf::CcaModel;
using fpcf::FusedFeature;
using fpcf::FusionMode;
using fpcf::Matrix;

namespace {

// Direct route for the canonical correlations: form
// Cxx^-1 Cxy Cyy^-1 Cxy^T explicitly (Gauss-Jordan inverses) and take its
// eigenvalues with unshifted QR iteration. Shares nothing with the
// library's whitened Jacobi solver.
std::vector<double> brute_force_rho_squared(const Matrix& x, const Matrix& y) {
    const int n = x.rows;
    std::vector<double> mx(x.cols, 0.0), my(y.cols, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < x.cols; ++j) mx[j] += x(i, j) / n;
        for (int j = 0; j < y.cols; ++j) my[j] += y(i, j) / n;
    }
    Matrix cxx(x.cols, x.cols), cyy(y.cols, y.cols), cxy(x.cols, y.cols);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < x.cols; ++a)
            for (int b = 0; b < x.cols; ++b)
                cxx(a, b) += (x(i, a) - mx[a]) * (x(i, b) - mx[b]) / n;
        for (int a = 0; a < y.cols; ++a)
            for (int b = 0; b < y.cols; ++b)
                cyy(a, b) += (y(i, a) - my[a]) * (y(i, b) - my[b]) / n;
        for (int a = 0; a < x.cols; ++a)
            for (int b = 0; b < y.cols; ++b)
                cxy(a, b) += (x(i, a) - mx[a]) * (y(i, b) - my[b]) / n;
    }
    const Matrix product = fpcf::matmul(
        fpcf::matmul(testutil::gj_inverse(cxx), cxy),
        fpcf::matmul(testutil::gj_inverse(cyy), fpcf::transpose(cxy)));
    return testutil::qr_eigenvalues(product);
}

Matrix gaussian_matrix(fpcf::Rng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

} // namespace

TEST_CASE("identical sets have all canonical correlations equal to 1") {
    fpcf::Rng rng(31);
    const Matrix x = gaussian_matrix(rng, 40, 5);
    const CcaModel model = fpcf::cca_fit(x, x, /*ridge=*/0.0);
    REQUIRE(model.pairs() == 5);
    for (double rho : model.correlations) {
        CHECK(rho <= 1.0 + 1e-8);
        CHECK(std::abs(rho - 1.0) < 1e-8);
    }
}

TEST_CASE("independent data has small sample correlations") {
    fpcf::Rng rng(32);
    const Matrix x = gaussian_matrix(rng, 1000, 2);
    const Matrix y = gaussian_matrix(rng, 1000, 2);
    const CcaModel model = fpcf::cca_fit(x, y, 0.0);
    for (double rho : model.correlations) CHECK(rho < 0.15);
}

TEST_CASE("one shared factor: rho_1 tracks corr(x1,y1), rho_2 near zero") {
    fpcf::Rng rng(33);
    const int n = 4000;
    Matrix x(n, 2), y(n, 2);
    std::vector<double> x1(n), y1(n);
    for (int i = 0; i < n; ++i) {
        const double t = rng.normal();
        x(i, 0) = t + 0.5 * rng.normal();
        x(i, 1) = rng.normal();
        y(i, 0) = t + 0.5 * rng.normal();
        y(i, 1) = rng.normal();
        x1[i] = x(i, 0);
        y1[i] = y(i, 0);
    }
    const CcaModel model = fpcf::cca_fit(x, y, 0.0);
    REQUIRE(model.pairs() >= 1);
    const double direct_corr = testutil::pearson(x1, y1);
    CHECK(std::abs(model.correlations[0] - direct_corr) < 0.05);
    if (model.pairs() > 1) CHECK(model.correlations[1] < 0.15);

    // Same sample against the brute-force eigensolve of the unsymmetric product.
    const std::vector<double> brute = brute_force_rho_squared(x, y);
    CHECK(std::abs(model.correlations[0] * model.correlations[0] - brute[0]) < 1e-8);
}

TEST_CASE("whitened solver matches brute-force eigensolve on 4x4 cases") {
    fpcf::Rng rng(34);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 200;
        Matrix x(n, 4), y(n, 4);
        for (int i = 0; i < n; ++i) {
            double shared[2] = {rng.normal(), rng.normal()};
            for (int j = 0; j < 4; ++j) {
                x(i, j) = shared[j % 2] * (0.3 + 0.2 * j) + rng.normal();
                y(i, j) = shared[(j + 1) % 2] * (0.5 - 0.1 * j) + rng.normal();
            }
        }
        const CcaModel model = fpcf::cca_fit(x, y, 0.0, -1, /*rho_floor=*/1e-9);
        const std::vector<double> brute = brute_force_rho_squared(x, y);
        REQUIRE(model.pairs() == 4);
        for (int j = 0; j < 4; ++j) {
            const double rho2 = model.correlations[j] * model.correlations[j];
            CHECK(std::abs(rho2 - brute[j]) < 1e-8);
        }
    }
}

TEST_CASE("canonical correlations are invariant to invertible transforms of X") {
    fpcf::Rng rng(35);
    const int n = 120;
    Matrix x(n, 5), y(n, 3);
    for (int i = 0; i < n; ++i) {
        const double t = rng.normal();
        for (int j = 0; j < 5; ++j) x(i, j) = t * 0.4 + rng.normal();
        for (int j = 0; j < 3; ++j) y(i, j) = t * 0.6 + rng.normal();
    }
    const CcaModel base = fpcf::cca_fit(x, y, 0.0, -1, 1e-9);

    for (int trial = 0; trial < 3; ++trial) {
        // Random invertible 5x5: identity plus a modest random perturbation.
        Matrix t5 = Matrix::identity(5);
        for (double& v : t5.data) v += 0.35 * rng.normal();
        const Matrix xt = fpcf::matmul(x, t5);

        const CcaModel transformed = fpcf::cca_fit(xt, y, 0.0, -1, 1e-9);
        REQUIRE(transformed.pairs() == base.pairs());
        for (int j = 0; j < base.pairs(); ++j)
            CHECK(std::abs(transformed.correlations[j] - base.correlations[j]) < 1e-6);
    }
}

TEST_CASE("training variates have unit variance, matched correlation, and cross-index decorrelation") {
    fpcf::Rng rng(36);
    const int n = 150;
    Matrix x(n, 4), y(n, 4);
    for (int i = 0; i < n; ++i) {
        const double s1 = rng.normal(), s2 = rng.normal();
        for (int j = 0; j < 4; ++j) {
            x(i, j) = (j % 2 ? s1 : s2) * 0.7 + rng.normal();
            y(i, j) = (j % 2 ? s2 : s1) * 0.4 + rng.normal();
        }
    }
    const CcaModel model = fpcf::cca_fit(x, y, 1e-8);
    REQUIRE(model.pairs() >= 2);

    const int k = model.pairs();
    std::vector<std::vector<double>> u(k, std::vector<double>(n)), v(k, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> xi(4), yi(4);
        for (int j = 0; j < 4; ++j) {
            xi[j] = x(i, j);
            yi[j] = y(i, j);
        }
        const FusedFeature f = fpcf::fuse_ffo1(model, xi, yi);
        for (int c = 0; c < k; ++c) {
            u[c][i] = f.values[c];
            v[c][i] = f.values[k + c];
        }
    }

    for (int c = 0; c < k; ++c) {
        double mu = 0.0, mv = 0.0;
        for (int i = 0; i < n; ++i) {
            mu += u[c][i] / n;
            mv += v[c][i] / n;
        }
        double var_u = 0.0, var_v = 0.0;
        for (int i = 0; i < n; ++i) {
            var_u += (u[c][i] - mu) * (u[c][i] - mu) / n;
            var_v += (v[c][i] - mv) * (v[c][i] - mv) / n;
        }
        CHECK(std::abs(var_u - 1.0) < 1e-6);
        CHECK(std::abs(var_v - 1.0) < 1e-6);
        CHECK(std::abs(testutil::pearson(u[c], v[c]) - model.correlations[c]) < 1e-6);
        for (int c2 = 0; c2 < k; ++c2)
            if (c2 != c) CHECK(std::abs(testutil::pearson(u[c], v[c2])) < 1e-6);
    }
}

TEST_CASE("fusion outputs") {
    // Hand-built single-pair model: A = B = e1, zero means.
    CcaModel model;
    model.mean_x.assign(2, 0.0);
    model.mean_y.assign(2, 0.0);
    model.basis_a = Matrix(2, 1);
    model.basis_a(0, 0) = 1.0;
    model.basis_b = Matrix(2, 1);
    model.basis_b(0, 0) = 1.0;
    model.correlations = {1.0};

    SUBCASE("coordinate readoff") {
        const FusedFeature f1 = fpcf::fuse_ffo1(model, {2.0, 0.0}, {3.0, 0.0});
        CHECK(f1.values == std::vector<double>{2.0, 3.0});
        CHECK(f1.mode == FusionMode::FFO1);
        const FusedFeature f2 = fpcf::fuse_ffo2(model, {2.0, 0.0}, {3.0, 0.0});
        CHECK(f2.values == std::vector<double>{5.0});
        CHECK(f2.mode == FusionMode::FFO2);
    }
    SUBCASE("means fuse to zero") {
        model.mean_x = {1.5, -2.0};
        model.mean_y = {0.25, 4.0};
        CHECK(fpcf::fuse_ffo1(model, model.mean_x, model.mean_y).values ==
              std::vector<double>{0.0, 0.0});
        CHECK(fpcf::fuse_ffo2(model, model.mean_x, model.mean_y).values ==
              std::vector<double>{0.0});
    }
    SUBCASE("length mismatch is rejected") {
        CHECK_THROWS_AS(fpcf::fuse_ffo1(model, {1.0}, {2.0, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS(fpcf::fuse_ffo2(model, {1.0, 0.0}, {2.0}), std::invalid_argument);
    }
}

TEST_CASE("FFO2 equals the sum of FFO1 halves on a fitted model") {
    fpcf::Rng rng(37);
    const int n = 60;
    Matrix x(n, 3), y(n, 4);
    for (int i = 0; i < n; ++i) {
        const double t = rng.normal();
        for (int j = 0; j < 3; ++j) x(i, j) = t + rng.normal();
        for (int j = 0; j < 4; ++j) y(i, j) = t + rng.normal();
    }
    const CcaModel model = fpcf::cca_fit(x, y, 1e-8);
    const int k = model.pairs();
    REQUIRE(k >= 1);

    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> xi = testutil::random_vector(rng, 3, -5.0, 5.0);
        const std::vector<double> yi = testutil::random_vector(rng, 4, -5.0, 5.0);
        const FusedFeature f1 = fpcf::fuse_ffo1(model, xi, yi);
        const FusedFeature f2 = fpcf::fuse_ffo2(model, xi, yi);
        REQUIRE(int(f1.values.size()) == 2 * k);
        REQUIRE(int(f2.values.size()) == k);
        for (int c = 0; c < k; ++c)
            CHECK(std::abs(f2.values[c] - (f1.values[c] + f1.values[k + c])) < 1e-12);
    }
}

TEST_CASE("fusion is linear in the centered inputs") {
    fpcf::Rng rng(38);
    const int n = 50;
    Matrix x(n, 3), y(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 3; ++j) {
            x(i, j) = rng.normal();
            y(i, j) = rng.normal();
        }
    const CcaModel model = fpcf::cca_fit(x, y, 1e-6);

    auto center = [](std::vector<double> v, const std::vector<double>& m) {
        for (size_t i = 0; i < v.size(); ++i) v[i] += m[i];
        return v;
    };
    const std::vector<double> a = testutil::random_vector(rng, 3, -1.0, 1.0);
    const std::vector<double> b = testutil::random_vector(rng, 3, -1.0, 1.0);
    const double alpha = 2.25;

    // f(mean + alpha*a) = alpha * f(mean + a) for both halves of FFO1.
    std::vector<double> scaled(3);
    for (int j = 0; j < 3; ++j) scaled[j] = alpha * a[j];
    const FusedFeature base =
        fpcf::fuse_ffo1(model, center(a, model.mean_x), center(b, model.mean_y));
    std::vector<double> scaled_b(3);
    for (int j = 0; j < 3; ++j) scaled_b[j] = alpha * b[j];
    const FusedFeature big =
        fpcf::fuse_ffo1(model, center(scaled, model.mean_x), center(scaled_b, model.mean_y));
    for (size_t c = 0; c < base.values.size(); ++c)
        CHECK(big.values[c] == doctest::Approx(alpha * base.values[c]).epsilon(1e-9));
}

TEST_CASE("argument and data errors") {
    fpcf::Rng rng(39);
    const Matrix x = gaussian_matrix(rng, 10, 4);
    const Matrix y = gaussian_matrix(rng, 9, 4);
    CHECK_THROWS_AS(fpcf::cca_fit(x, y), std::invalid_argument);

    const Matrix wide = gaussian_matrix(rng, 10, 10);
    CHECK_THROWS_WITH_AS(fpcf::cca_fit(wide, gaussian_matrix(rng, 10, 4)),
                         doctest::Contains("N-1"), std::invalid_argument);

    Matrix bad = gaussian_matrix(rng, 10, 3);
    bad(4, 1) = std::nan("");
    CHECK_THROWS_AS(fpcf::cca_fit(bad, gaussian_matrix(rng, 10, 3)), fpcf::data_error);
}
