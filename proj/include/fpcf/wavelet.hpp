#pragma once

#include <array>
#include <string>
#include <string_view>

#include "linalg.hpp"

namespace fpcf {

// Daubechies-8 scaling filter (16 taps, 8 vanishing moments), derived by
// spectral factorization at 60-digit precision and rounded to double. The
// rounded values satisfy sum = sqrt(2) exactly and the double-shift
// orthonormality identities to below 1e-16.
inline constexpr std::array<double, 16> kDb8Scaling = {
    0.05441584224310401,
    0.31287159091429997,
    0.67563073629728981,
    0.58535468365420671,
    -0.015829105256349306,
    -0.28401554296154693,
    0.00047248457391328277,
    0.12874742662047846,
    -0.017369301001807546,
    -0.044088253930794752,
    0.013981027917398282,
    0.0087460940474057767,
    -0.0048703529934515743,
    -0.00039174037337694705,
    0.00067544940645056937,
    -0.00011747678412476953,
};

inline constexpr int kDb8Taps = 16;

struct WaveletConfig {
    int levels = 2;
    static constexpr std::string_view family = "db8";
};

// One level of 2-D decomposition; all four subbands share dimensions
// floor((n-1)/2) + 8 per axis.
struct SubbandSet {
    Matrix approx;     // low/low
    Matrix horizontal; // row-low, col-high
    Matrix vertical;   // row-high, col-low
    Matrix diagonal;   // high/high
};

inline constexpr int dwt_output_len(int n) { return (n - 1) / 2 + 8; }

namespace detail {

struct Db8Bank {
    std::array<double, 16> dec_lo;  // reversed scaling filter
    std::array<double, 16> dec_hi;  // (-1)^{k+1} h[k]
    std::array<double, 16> rec_lo;  // scaling filter
    std::array<double, 16> rec_hi;  // (-1)^k h[15-k]
    std::array<double, 16> conv_lo; // dec_lo reversed = scaling filter
    std::array<double, 16> conv_hi; // dec_hi reversed = rec_hi
};

inline constexpr Db8Bank make_db8_bank() {
    Db8Bank b{};
    for (int k = 0; k < 16; ++k) {
        b.rec_lo[k] = kDb8Scaling[k];
        b.dec_lo[k] = kDb8Scaling[15 - k];
        b.dec_hi[k] = (k % 2 == 0 ? -1.0 : 1.0) * kDb8Scaling[k];
        b.rec_hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * kDb8Scaling[15 - k];
        b.conv_lo[k] = kDb8Scaling[k];
        b.conv_hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * kDb8Scaling[15 - k];
    }
    return b;
}

inline constexpr Db8Bank kDb8Bank = make_db8_bank();

// Half-point symmetric sample lookup: x[-1] = x[0], x[n] = x[n-1], ...
inline double sym_sample(const double* x, int n, int i) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return x[i];
}

// One analysis pass along a length-n signal: convolve the symmetric
// extension with both filters and downsample,
//   out[k] = sum_t f[t] x(2k+1-t) = sum_s conv_f[s] x(2k-14+s)
// with conv_f the reversed filter. Taps accumulate in ascending s order;
// every other filter path in this header uses the same order, which keeps
// results reproducible and lets the approx-only fast path stay
// bit-identical to this reference form.
inline void analyze_1d(const double* x, int n, double* low, double* high) {
    const int out_len = dwt_output_len(n);
    for (int k = 0; k < out_len; ++k) {
        const int first = 2 * k + 1 - (kDb8Taps - 1);
        double lo = 0.0;
        double hi = 0.0;
        if (first >= 0 && first + kDb8Taps <= n) {
            const double* p = x + first;
            for (int s = 0; s < kDb8Taps; ++s) {
                lo += kDb8Bank.conv_lo[s] * p[s];
                hi += kDb8Bank.conv_hi[s] * p[s];
            }
        } else {
            for (int s = 0; s < kDb8Taps; ++s) {
                const double v = sym_sample(x, n, first + s);
                lo += kDb8Bank.conv_lo[s] * v;
                hi += kDb8Bank.conv_hi[s] * v;
            }
        }
        low[k] = lo;
        high[k] = hi;
    }
}

// Low-pass filtering DOWN the rows of a rows x cols buffer, all columns
// in lockstep:
//   out[k][c] = sum_s conv_lo[s] * m[sym(2k-14+s)][c],  s ascending.
// Each output cell accumulates in the same sequential order as
// analyze_1d, but the inner loop runs across columns, which the compiler
// vectorizes freely since no sum is reassociated.
// Scratch vectors only ever grow, so repeated calls with alternating
// sizes pay no per-call zero-fill; callers fully overwrite the region
// they read back, so stale contents are never observed.
inline double* scratch_grow(std::vector<double>& v, size_t n) {
    if (v.size() < n) v.resize(n);
    return v.data();
}

inline void colpass_low_into(const double* m, int rows, int cols, std::vector<double>& out) {
    const int out_len = dwt_output_len(rows);
    double* base = scratch_grow(out, static_cast<size_t>(out_len) * cols);
    for (int k = 0; k < out_len; ++k) {
        double* dst = base + static_cast<size_t>(k) * cols;
        const int first = 2 * k + 1 - (kDb8Taps - 1);
        for (int s = 0; s < kDb8Taps; ++s) {
            int row = first + s;
            if (row < 0) row = -row - 1;
            if (row >= rows) row = 2 * rows - 1 - row;
            const double coeff = kDb8Bank.conv_lo[s];
            const double* src = m + static_cast<size_t>(row) * cols;
            if (s == 0)
                for (int c = 0; c < cols; ++c) dst[c] = coeff * src[c];
            else
                for (int c = 0; c < cols; ++c) dst[c] += coeff * src[c];
        }
    }
}

inline void transpose_into(const double* m, int rows, int cols, std::vector<double>& out) {
    double* base = scratch_grow(out, static_cast<size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            base[static_cast<size_t>(c) * rows + r] = m[static_cast<size_t>(r) * cols + c];
}

// Approximation band of one 2-D level into caller scratch: only the
// low/low arithmetic of dwt2_single_level, producing the same values
// (bit for bit) without the detail bands. Rows are filtered first, as in
// the full transform; each pass runs as a vertical sweep over a
// transposed view. `out` holds out_rows x out_cols on return.
struct ApproxScratch {
    std::vector<double> a, b;
};

inline void dwt2_approx_only_into(const double* img, int rows, int cols, ApproxScratch& scratch,
                                  std::vector<double>& out) {
    transpose_into(img, rows, cols, scratch.a);            // cols x rows
    colpass_low_into(scratch.a.data(), cols, rows, scratch.b); // out_cols x rows
    const int out_cols = dwt_output_len(cols);
    transpose_into(scratch.b.data(), out_cols, rows, scratch.a); // rows x out_cols
    colpass_low_into(scratch.a.data(), rows, out_cols, out);     // out_rows x out_cols
}

// Analysis along every row: returns (low, high), each rows x dwt_output_len(cols).
inline void analyze_rows(const Matrix& in, Matrix& low, Matrix& high) {
    const int out_cols = dwt_output_len(in.cols);
    low = Matrix(in.rows, out_cols);
    high = Matrix(in.rows, out_cols);
    for (int r = 0; r < in.rows; ++r)
        analyze_1d(&in.data[static_cast<size_t>(r) * in.cols], in.cols,
                   &low.data[static_cast<size_t>(r) * out_cols],
                   &high.data[static_cast<size_t>(r) * out_cols]);
}

// Inverse of analyze_1d: upsample, convolve with the synthesis pair, keep
// the center target_len samples (offset 14 for a 16-tap bank).
inline void synthesize_1d(const double* low, const double* high, int sub_len,
                          double* out, int target_len) {
    const int up_len = 2 * sub_len - 1;
    const int full_len = up_len + kDb8Taps - 1;
    std::vector<double> acc(full_len, 0.0);
    for (int i = 0; i < sub_len; ++i) {
        const double a = low[i];
        const double d = high[i];
        double* dst = acc.data() + 2 * i;
        for (int t = 0; t < kDb8Taps; ++t)
            dst[t] += a * kDb8Bank.rec_lo[t] + d * kDb8Bank.rec_hi[t];
    }
    const int start = kDb8Taps - 2;
    for (int i = 0; i < target_len; ++i) out[i] = acc[start + i];
}

inline void synthesize_rows(const Matrix& low, const Matrix& high, int target_cols, Matrix& out) {
    out = Matrix(low.rows, target_cols);
    for (int r = 0; r < low.rows; ++r)
        synthesize_1d(&low.data[static_cast<size_t>(r) * low.cols],
                      &high.data[static_cast<size_t>(r) * high.cols], low.cols,
                      &out.data[static_cast<size_t>(r) * target_cols], target_cols);
}

inline void require_decomposable(const Matrix& img, const std::string& where) {
    if (img.rows < kDb8Taps)
        throw std::invalid_argument(where + ": rows = " + std::to_string(img.rows) +
                                    " is below the 16-pixel minimum");
    if (img.cols < kDb8Taps)
        throw std::invalid_argument(where + ": cols = " + std::to_string(img.cols) +
                                    " is below the 16-pixel minimum");
}

} // namespace detail

// Separable single-level 2-D DWT: rows are filtered and downsampled first,
// then columns of each half. Half-point symmetric boundary extension.
inline SubbandSet dwt2_single_level(const Matrix& img) {
    detail::require_decomposable(img, "dwt2_single_level");

    Matrix row_low, row_high;
    detail::analyze_rows(img, row_low, row_high);

    // Column pass via transposed row pass; tap order inside each
    // convolution is unchanged, so results are bit-identical.
    Matrix ll, lh, hl, hh;
    {
        Matrix t = transpose(row_low);
        Matrix lo, hi;
        detail::analyze_rows(t, lo, hi);
        ll = transpose(lo);
        lh = transpose(hi);
    }
    {
        Matrix t = transpose(row_high);
        Matrix lo, hi;
        detail::analyze_rows(t, lo, hi);
        hl = transpose(lo);
        hh = transpose(hi);
    }

    SubbandSet s;
    s.approx = std::move(ll);
    s.horizontal = std::move(lh);
    s.vertical = std::move(hl);
    s.diagonal = std::move(hh);
    return s;
}

// Inverse single-level transform; target dimensions must be supplied since
// both parities map to the same subband size.
inline Matrix idwt2_single_level(const SubbandSet& s, int target_rows, int target_cols) {
    const int sub_rows = s.approx.rows;
    if (dwt_output_len(target_rows) != sub_rows || dwt_output_len(target_cols) != s.approx.cols)
        throw std::invalid_argument("idwt2_single_level: target " + std::to_string(target_rows) +
                                    "x" + std::to_string(target_cols) +
                                    " does not match subband dimensions");

    // Undo the column pass.
    Matrix row_low, row_high;
    {
        Matrix lo = transpose(s.approx);
        Matrix hi = transpose(s.horizontal);
        Matrix t;
        detail::synthesize_rows(lo, hi, target_rows, t);
        row_low = transpose(t);
    }
    {
        Matrix lo = transpose(s.vertical);
        Matrix hi = transpose(s.diagonal);
        Matrix t;
        detail::synthesize_rows(lo, hi, target_rows, t);
        row_high = transpose(t);
    }

    Matrix out;
    detail::synthesize_rows(row_low, row_high, target_cols, out);
    return out;
}

// Iterated approximation: keeps only the low/low band at each level.
// A 150x130 input at levels=2 yields 48x43; a 50x130 strip yields 23x43.
inline Matrix approx_level(const Matrix& img, const WaveletConfig& cfg) {
    if (cfg.levels < 1)
        throw std::invalid_argument("approx_level: levels must be >= 1, got " +
                                    std::to_string(cfg.levels));
    // Scratch persists per thread so the per-image hot path allocates
    // nothing once warm; results are unaffected (pure value computation).
    thread_local detail::ApproxScratch scratch;
    thread_local std::vector<double> cur, next;

    const double* src = img.data.data();
    int rows = img.rows;
    int cols = img.cols;
    for (int level = 1; level <= cfg.levels; ++level) {
        if (rows < kDb8Taps)
            throw std::invalid_argument("approx_level: level " + std::to_string(level) +
                                        ": rows = " + std::to_string(rows) +
                                        " is below the 16-pixel minimum");
        if (cols < kDb8Taps)
            throw std::invalid_argument("approx_level: level " + std::to_string(level) +
                                        ": cols = " + std::to_string(cols) +
                                        " is below the 16-pixel minimum");
        detail::dwt2_approx_only_into(src, rows, cols, scratch, next);
        rows = dwt_output_len(rows);
        cols = dwt_output_len(cols);
        std::swap(cur, next);
        src = cur.data();
    }

    Matrix result(rows, cols);
    result.data.assign(cur.begin(), cur.begin() + static_cast<ptrdiff_t>(result.data.size()));
    return result;
}

} // namespace fpcf
