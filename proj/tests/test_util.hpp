#pragma once

#include <memory>
#include <vector>

#include "doabcs/array_model.hpp"
#include "doabcs/rng.hpp"
#include "doabcs/sparse_bayes.hpp"

namespace testutil {

using doabcs::Matrix;

inline Matrix random_matrix(doabcs::Rng& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = scale * rng.normal();
  return m;
}

inline std::vector<double> random_vector(doabcs::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline std::vector<double> random_precisions(doabcs::Rng& rng, std::size_t n, double lo = 0.1,
                                             double hi = 10.0) {
  std::vector<double> p(n);
  for (auto& x : p) x = lo * std::pow(hi / lo, rng.uniform01());
  return p;
}

// A small random problem with its dictionary kept alive alongside.
struct OwnedProblem {
  std::unique_ptr<doabcs::Dictionary> dict;
  doabcs::SparseProblem problem;
  std::vector<double> precision;
  double sigma2 = 1.0;
};

inline OwnedProblem random_problem(doabcs::Rng& rng, std::size_t m2, std::size_t n2,
                                   bool zero_prior_mean = false) {
  OwnedProblem out;
  out.dict = std::make_unique<doabcs::Dictionary>(random_matrix(rng, m2, n2));
  std::vector<double> xe = zero_prior_mean ? std::vector<double>(n2, 0.0)
                                           : random_vector(rng, n2);
  out.problem = doabcs::SparseProblem(*out.dict, random_vector(rng, m2), std::move(xe));
  out.precision = random_precisions(rng, n2, 0.25, 4.0);
  out.sigma2 = 0.25 + rng.uniform01();
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// |a-b| relative to max(1, |a|): absolute for small values, relative for big.
inline double scaled_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(a));
}

inline double max_scaled_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, scaled_diff(a[i], b[i]));
  return d;
}

// Precision trajectories are compared in variance space: a coordinate whose
// precision runs away carries no information in its exact magnitude, while
// 1/p compares all coordinates on the scale the model actually uses.
inline double max_variance_diff(std::span<const double> p_a, std::span<const double> p_b) {
  double d = 0.0;
  for (std::size_t i = 0; i < p_a.size(); ++i) {
    d = std::max(d, std::abs(1.0 / p_a[i] - 1.0 / p_b[i]));
  }
  return d;
}

}  // namespace testutil
