// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "dirt/simd/kernels.hpp"

namespace dirt::simd {

const KernelTable* avx2_table_unchecked() noexcept;

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

/// Lane j of the result is the horizontal sum of vj.
inline __m256d hsum4(__m256d v0, __m256d v1, __m256d v2, __m256d v3) {
    const __m256d s01 = _mm256_hadd_pd(v0, v1);  // v0[0]+v0[1], v1[0]+v1[1], v0[2]+v0[3], v1[2]+v1[3]
    const __m256d s23 = _mm256_hadd_pd(v2, v3);
    const __m256d lo = _mm256_permute2f128_pd(s01, s23, 0x20);
    const __m256d hi = _mm256_permute2f128_pd(s01, s23, 0x31);
    return _mm256_add_pd(lo, hi);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d r = _mm256_fmadd_pd(a, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j));
        _mm256_storeu_pd(y + j, r);
    }
    for (; j < n; ++j) y[j] += alpha * x[j];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j + 4), _mm256_loadu_pd(y + j + 4), acc1);
    }
    for (; j + 4 <= n; j += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; j < n; ++j) s += x[j] * y[j];
    return s;
}

void vecmat_avx2(const double* v, const double* m, std::size_t rows, std::size_t cols,
                 std::size_t row_stride, double* out) {
    std::size_t j = 0;
    for (; j + 8 <= cols; j += 8) {
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        for (std::size_t a = 0; a < rows; ++a) {
            const __m256d va = _mm256_set1_pd(v[a]);
            const double* row = m + a * row_stride + j;
            acc0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(row), acc0);
            acc1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(row + 4), acc1);
        }
        _mm256_storeu_pd(out + j, acc0);
        _mm256_storeu_pd(out + j + 4, acc1);
    }
    for (; j + 4 <= cols; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t a = 0; a < rows; ++a)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(v[a]), _mm256_loadu_pd(m + a * row_stride + j), acc);
        _mm256_storeu_pd(out + j, acc);
    }
    for (; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < rows; ++a) s += v[a] * m[a * row_stride + j];
        out[j] = s;
    }
}

// Width-4 nodes fill one register; four cells are reduced per iteration.
void cell_masses_width4(const double* nodes, std::size_t n_nodes, const double* cell_len,
                        double* out) {
    const std::size_t cells = n_nodes - 1;
    const __m256d third = _mm256_set1_pd(1.0 / 3.0);
    std::size_t i = 0;
    for (; i + 4 <= cells; i += 4) {
        __m256d v[5];
        for (int q = 0; q < 5; ++q) v[q] = _mm256_loadu_pd(nodes + (i + q) * 4);
        __m256d t[4];
        for (int q = 0; q < 4; ++q) {
            // |a|^2 + a.b + |b|^2 = a.(a + b) + b.b, summed lane-wise
            const __m256d ab = _mm256_add_pd(v[q], v[q + 1]);
            t[q] = _mm256_fmadd_pd(v[q + 1], v[q + 1], _mm256_mul_pd(v[q], ab));
        }
        const __m256d sums = hsum4(t[0], t[1], t[2], t[3]);
        const __m256d len = _mm256_mul_pd(_mm256_loadu_pd(cell_len + i), third);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(len, sums));
    }
    for (; i < cells; ++i) {
        const __m256d a = _mm256_loadu_pd(nodes + i * 4);
        const __m256d b = _mm256_loadu_pd(nodes + (i + 1) * 4);
        const __m256d t = _mm256_fmadd_pd(b, b, _mm256_mul_pd(a, _mm256_add_pd(a, b)));
        out[i] = cell_len[i] / 3.0 * hsum(t);
    }
}

void cell_masses_avx2(const double* nodes, std::size_t n_nodes, std::size_t width,
                      const double* cell_len, double* out) {
    if (n_nodes < 2) return;
    if (width == 4) {
        cell_masses_width4(nodes, n_nodes, cell_len, out);
        return;
    }
    if (width < 4) {
        // Too narrow for a register; plain loops beat the call overhead of dot_avx2.
        for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
            const double* a = nodes + i * width;
            const double* b = a + width;
            double s = 0.0;
            for (std::size_t j = 0; j < width; ++j) s += a[j] * (a[j] + b[j]) + b[j] * b[j];
            out[i] = cell_len[i] / 3.0 * s;
        }
        return;
    }
    double sq_left = dot_avx2(nodes, nodes, width);
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        const double* a = nodes + i * width;
        const double* b = a + width;
        const double sq_right = dot_avx2(b, b, width);
        const double cross = dot_avx2(a, b, width);
        out[i] = cell_len[i] / 3.0 * (sq_left + cross + sq_right);
        sq_left = sq_right;
    }
}

}  // namespace

const KernelTable* avx2_table_unchecked() noexcept {
    static const KernelTable table{Isa::avx2, "avx2", axpy_avx2, dot_avx2, vecmat_avx2,
                                   cell_masses_avx2};
    return &table;
}

}  // namespace dirt::simd
