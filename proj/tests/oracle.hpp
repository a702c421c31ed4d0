#pragma once

// Brute-force reference implementations for the test suites. Everything here
// is deliberately naive (dense Gauss-Jordan, triple loops, adaptive Simpson)
// and shares no computational code with the production library; the library
// types are used as plain data containers only.

#include <functional>
#include <span>
#include <vector>

#include "doabcs/linalg.hpp"
#include "doabcs/sparse_bayes.hpp"

namespace oracle {

using doabcs::Matrix;

struct FiniteDiffSpec {
  double relative_step = 1e-6;
};

// Dense log N(y; A xe, sigma2 I + A P^-1 A^T).
double log_marginal_direct(const Matrix& a, std::span<const double> y,
                           std::span<const double> xe, std::span<const double> precision,
                           double sigma2);

struct DensePosterior {
  Matrix cov;
  std::vector<double> mean;
};

// Normal equations (sigma^-2 A^T A + P) mu = sigma^-2 A^T y + P xe solved by
// Gauss-Jordan with partial pivoting.
DensePosterior posterior_dense(const Matrix& a, std::span<const double> y,
                               std::span<const double> xe, std::span<const double> precision,
                               double sigma2);

std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> at,
                                         const FiniteDiffSpec& spec = {});

// Integrates P(y|x) P(x|p, xe) dx for a scalar latent dimension by adaptive
// Simpson quadrature over [xe - 10/sqrt(p), xe + 10/sqrt(p)].
double evidence_quadrature_1d(const Matrix& a, std::span<const double> y, double xe,
                              double precision, double sigma2);

struct DenseKalman {
  std::vector<double> x;
  Matrix cov;
  Matrix gain;
};

DenseKalman kalman_update_dense(const Matrix& a, std::span<const double> x_pred,
                                const Matrix& cov_pred, std::span<const double> innovation,
                                double sigma2);

// One classical-RVM iterate trace entry (zero prior mean), mirroring the
// production iteration schedule: posterior statistics from the pre-update
// hyperparameters, then the MacKay precision update, then the noise update
// guarded by the same residual-dof rule, then pruning at the precision cap
// (pruned coefficients pin to zero and leave the model).
struct ClassicalRvmIterate {
  std::vector<double> precision;  // post-update; pruned entries sit at the cap
  double sigma2 = 0.0;            // post-update
  std::vector<double> mean;       // pre-update posterior, zeros when pruned
  std::vector<double> cov_diag;
  std::vector<double> gamma;
};

std::vector<ClassicalRvmIterate> classical_rvm_iterates(const Matrix& a,
                                                        std::span<const double> y,
                                                        double p_init, double sigma2_init,
                                                        double noise_dof_min, double p_cap,
                                                        int iters);

// Golden-section maximizer of f on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-10);

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
std::vector<double> sym_eigenvalues(const Matrix& s);

// Uniformly random test matrix helpers driven by a caller-owned generator
// living in test code.
Matrix matmul_naive(const Matrix& a, const Matrix& b);
std::vector<double> matvec_naive(const Matrix& a, std::span<const double> x);
Matrix gauss_jordan_inverse(const Matrix& a);

}  // namespace oracle
