#pragma once

#include <cstddef>

namespace dirt::simd {

enum class Isa { scalar, avx2 };

/// Hot inner loops of core contraction and squared-TT marginalization.
/// Every table computes the same quantities; the AVX2 table may differ from the
/// scalar one only by floating-point reassociation (fused multiply-add, lane sums).
struct KernelTable {
    Isa isa;
    const char* name;

    /// y[j] += alpha * x[j], j < n.
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    /// sum_j x[j] * y[j], j < n.
    double (*dot)(const double* x, const double* y, std::size_t n);

    /// out[j] = sum_a v[a] * m[a * row_stride + j] for a < rows, j < cols.
    void (*vecmat)(const double* v, const double* m, std::size_t rows, std::size_t cols,
                   std::size_t row_stride, double* out);

    /// Integral of |p(t)|^2 over each cell of a piecewise-linear vector function.
    /// `nodes` holds n_nodes vectors of length `width` back to back; `cell_len` holds
    /// n_nodes-1 cell lengths. out[i] = len_i/3 * (|v_i|^2 + v_i.v_{i+1} + |v_{i+1}|^2).
    void (*cell_masses)(const double* nodes, std::size_t n_nodes, std::size_t width,
                        const double* cell_len, double* out);
};

const KernelTable& scalar_kernels() noexcept;

/// The AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Table used by the library: AVX2 when available unless the environment variable
/// DIRT_SIMD=scalar is set at first use. Selected once per process.
const KernelTable& active_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

}  // namespace dirt::simd
