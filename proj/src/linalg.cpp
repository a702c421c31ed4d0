#include "doabcs/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstring>

#include "doabcs/kernels.hpp"

namespace doabcs {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  assert(a.cols == b.rows);
  Matrix c(a.rows, b.cols);
  kern::gemm_acc(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
  return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  assert(x.size() == a.cols);
  std::vector<double> y(a.rows);
  kern::gemv(a.data.data(), a.rows, a.cols, x.data(), y.data());
  return y;
}

std::vector<double> matvec_t(const Matrix& a, std::span<const double> x) {
  assert(x.size() == a.rows);
  std::vector<double> y(a.cols);
  kern::gemv_t(a.data.data(), a.rows, a.cols, x.data(), y.data());
  return y;
}

void symmetrize(Matrix& a) {
  assert(a.rows == a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

Cholesky::Cholesky(const Matrix& spd) {
  assert(spd.rows == spd.cols);
  const std::size_t n = spd.rows;
  lower_ = Matrix(n, n);

  // Jacobi scaling: factor D^{-1} A D^{-1} with D = diag(sqrt(a_ii)), then
  // unscale the factor. Keeps pivots near 1 even when diag(A) spans ~1e14.
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double aii = spd(i, i);
    if (!(aii > 0.0) || !std::isfinite(aii)) {
      throw SolverError("cholesky: non-positive diagonal entry", INFINITY);
    }
    d[i] = std::sqrt(aii);
  }

  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = spd(i, j) / (d[i] * d[j]);

  double min_pivot = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double acc = kern::dot(s.row(i), s.row(j), j);
      const double v = s(i, j) - acc;
      if (j == i) {
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw SolverError("cholesky: factorization breakdown at pivot " +
                                std::to_string(i),
                            min_pivot > 0.0 ? 1.0 / (min_pivot * min_pivot)
                                            : INFINITY);
        }
        const double piv = std::sqrt(v);
        s(i, i) = piv;
        if (piv < min_pivot) min_pivot = piv;
      } else {
        s(i, j) = v / s(j, j);
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = 0.0;
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) lower_(i, j) = d[i] * s(i, j);
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

std::vector<double> Cholesky::solve_lower(std::span<const double> b) const {
  const std::size_t n = dim();
  assert(b.size() == n);
  std::vector<double> z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double acc = kern::dot(lower_.row(i), z.data(), i);
    z[i] = (z[i] - acc) / lower_(i, i);
  }
  return z;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = dim();
  std::vector<double> x = solve_lower(b);
  // Back substitution with L^T, walking rows of L so accesses stay contiguous.
  for (std::size_t k = n; k-- > 0;) {
    x[k] /= lower_(k, k);
    if (k > 0) kern::axpy(-x[k], lower_.row(k), x.data(), k);
  }
  return x;
}

Matrix Cholesky::inverse_lower() const {
  const std::size_t n = dim();
  Matrix m(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    col[j] = 1.0 / lower_(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double s = kern::dot(lower_.row(i) + j, col.data() + j, i - j);
      col[i] = -s / lower_(i, i);
    }
    for (std::size_t i = j; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

std::vector<double> Cholesky::inverse_diag() const {
  // A^{-1} = L^{-T} L^{-1}; diag entries are squared column norms of L^{-1}.
  const Matrix m = inverse_lower();
  const std::size_t n = dim();
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) diag[j] += m(i, j) * m(i, j);
  return diag;
}

Matrix Cholesky::inverse() const {
  const Matrix m = inverse_lower();
  const std::size_t n = dim();
  Matrix inv(n, n);
  kern::gram(m.data.data(), n, n, inv.data.data());
  return inv;
}

}  // namespace doabcs
