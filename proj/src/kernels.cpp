#include "doabcs/kernels.hpp"

#include <atomic>
#include <cstring>
#include <vector>

namespace doabcs::kern {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

#if defined(DOABCS_KERNELS_AVX2_TU)
// Implemented in kernels_avx2.cpp (compiled with -mavx2 -mfma).
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_sq_avx2(const double* x, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
#endif

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

constexpr Ops kScalarOps{dot_scalar, sum_sq_scalar, axpy_scalar, scale_scalar};

#if defined(DOABCS_KERNELS_AVX2_TU)
constexpr Ops kAvx2Ops{dot_avx2, sum_sq_avx2, axpy_avx2, scale_avx2};
#endif

bool cpu_has_avx2() {
#if defined(DOABCS_KERNELS_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  const Ops* ops;
  Backend backend;
  Dispatch() {
    if (cpu_has_avx2()) {
#if defined(DOABCS_KERNELS_AVX2_TU)
      ops = &kAvx2Ops;
      backend = Backend::avx2;
      return;
#endif
    }
    ops = &kScalarOps;
    backend = Backend::scalar;
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace detail

Backend active_backend() { return detail::dispatch().backend; }

bool avx2_available() { return detail::cpu_has_avx2(); }

bool set_backend(Backend b) {
  auto& d = detail::dispatch();
  switch (b) {
    case Backend::scalar:
      d.ops = &detail::kScalarOps;
      d.backend = Backend::scalar;
      return true;
    case Backend::avx2:
#if defined(DOABCS_KERNELS_AVX2_TU)
      if (detail::cpu_has_avx2()) {
        d.ops = &detail::kAvx2Ops;
        d.backend = Backend::avx2;
        return true;
      }
#endif
      return false;
  }
  return false;
}

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
  return detail::dispatch().ops->dot(a, b, n);
}

double sum_sq(const double* x, std::size_t n) {
  return detail::dispatch().ops->sum_sq(x, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  detail::dispatch().ops->axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  detail::dispatch().ops->scale(alpha, x, n);
}

void gemv(const double* a, std::size_t rows, std::size_t cols,
          const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  std::memset(y, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) axpy(x[r], a + r * cols, y, cols);
}

void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (std::size_t l = 0; l < k; ++l) {
      if (arow[l] != 0.0) axpy(arow[l], b + l * n, crow, n);
    }
  }
}

void gram(const double* a, std::size_t rows, std::size_t cols, double* g) {
  std::memset(g, 0, cols * cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    const double* arow = a + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      if (arow[i] != 0.0) axpy(arow[i], arow, g + i * cols, cols);
    }
  }
}

}  // namespace doabcs::kern
