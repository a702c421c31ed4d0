#pragma once

// Small dense linear algebra on top of the kernel layer: row-major matrices,
// SPD Cholesky factorization with Jacobi scaling, triangular solves.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace doabcs {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  static Matrix identity(std::size_t n);
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
std::vector<double> matvec_t(const Matrix& a, std::span<const double> x);
void symmetrize(Matrix& a);

// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
// The factorization Jacobi-scales A internally, which keeps the pivots well
// behaved when diagonal entries span many orders of magnitude. Throws
// SolverError (with a pivot-based condition estimate) on breakdown.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& spd);

  std::size_t dim() const { return lower_.rows; }
  const Matrix& lower() const { return lower_; }
  double log_det() const;  // log det(A)

  // Solve A x = b.
  std::vector<double> solve(std::span<const double> b) const;
  // Solve L z = b (forward substitution only).
  std::vector<double> solve_lower(std::span<const double> b) const;
  // diag(A^{-1}) without forming the full inverse.
  std::vector<double> inverse_diag() const;
  // Full A^{-1}.
  Matrix inverse() const;

 private:
  Matrix lower_;
  Matrix inverse_lower() const;
};

}  // namespace doabcs
