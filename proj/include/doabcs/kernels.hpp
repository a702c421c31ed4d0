#pragma once

// Double-precision arithmetic kernels used by the dense linear algebra layer.
// Every operation has a scalar reference implementation and, on x86-64 CPUs
// that support it, an AVX2+FMA variant. The backend is chosen once at startup
// from CPUID and can be overridden (mainly by the equivalence tests).

#include <cstddef>
#include <string_view>

namespace doabcs::kern {

enum class Backend { scalar, avx2 };

// Currently selected backend.
Backend active_backend();

// Force a backend. Returns false (and leaves the selection unchanged) when
// the requested backend is not available in this build / on this CPU.
bool set_backend(Backend b);

// True when the AVX2 variants were compiled in and the CPU supports them.
bool avx2_available();

std::string_view backend_name(Backend b);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i x[i]^2
double sum_sq(const double* x, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// x[i] *= alpha
void scale(double alpha, double* x, std::size_t n);

// y = A x for row-major A (rows x cols)
void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y);

// y = A^T x for row-major A (rows x cols); y has length cols
void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);

// C += A * B, all row-major; A: m x k, B: k x n, C: m x n
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n);

// G = A^T A for row-major A (rows x cols); G is cols x cols, fully filled
void gram(const double* a, std::size_t rows, std::size_t cols, double* g);

}  // namespace doabcs::kern
