#include "dirt/simd/kernels.hpp"

namespace dirt::simd {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += x[j] * y[j];
    return s;
}

void vecmat_scalar(const double* v, const double* m, std::size_t rows, std::size_t cols,
                   std::size_t row_stride, double* out) {
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t a = 0; a < rows; ++a) axpy_scalar(v[a], m + a * row_stride, out, cols);
}

void cell_masses_scalar(const double* nodes, std::size_t n_nodes, std::size_t width,
                        const double* cell_len, double* out) {
    if (n_nodes < 2) return;
    double sq_left = dot_scalar(nodes, nodes, width);
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        const double* a = nodes + i * width;
        const double* b = a + width;
        const double sq_right = dot_scalar(b, b, width);
        const double cross = dot_scalar(a, b, width);
        out[i] = cell_len[i] / 3.0 * (sq_left + cross + sq_right);
        sq_left = sq_right;
    }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{Isa::scalar, "scalar", axpy_scalar, dot_scalar, vecmat_scalar,
                                   cell_masses_scalar};
    return table;
}

}  // namespace dirt::simd
