#pragma once

// Uniform linear array model: steering vectors over an angular grid, snapshot
// synthesis, and the real/imaginary stacked embedding used by the estimators.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "doabcs/linalg.hpp"
#include "doabcs/rng.hpp"

namespace doabcs {

using cplx = std::complex<double>;

struct CMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  CMatrix() = default;
  CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  cplx& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  cplx operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Sensor layout of a linear array. Positions are multiples of the adjacent
// separation; the first sensor sits at the origin. phase(m) is the per-sensor
// phase coefficient, so that the response of sensor m to a plane wave from
// angle theta is exp(-i * phase(m) * cos(theta)).
struct ArrayGeometry {
  int num_sensors = 0;
  std::vector<double> spacing_multiples;
  double phase_scale = 0.0;  // 2*pi * (adjacent separation in wavelengths)

  ArrayGeometry() = default;
  ArrayGeometry(int sensors, std::vector<double> multiples, double spacing_wavelengths);

  // The common case: sensors at 0, 1, ..., M-1 multiples of the separation.
  static ArrayGeometry uniform(int sensors, double spacing_wavelengths);
  static ArrayGeometry half_wavelength(int sensors) { return uniform(sensors, 0.5); }

  double phase(int m) const { return phase_scale * spacing_multiples[m]; }
};

// Uniformly spaced candidate angles in degrees over [0, 180].
struct AngularGrid {
  std::vector<double> angles_deg;
  double spacing_deg = 0.0;

  static AngularGrid uniform(double spacing_deg);  // covers [0, 180]

  std::size_t size() const { return angles_deg.size(); }
  double angle(std::size_t i) const { return angles_deg[i]; }
  std::size_t nearest_index(double theta_deg) const;
  // Index of theta_deg if it lies on the grid (within 1e-9 deg); throws
  // std::domain_error otherwise.
  std::size_t index_of(double theta_deg) const;
};

struct ComplexSnapshot {
  std::vector<cplx> y;
  int k = 0;
};

std::vector<cplx> steering_vector(const ArrayGeometry& geom, double theta_deg);

CMatrix build_dictionary(const ArrayGeometry& geom, const AngularGrid& grid);

// [[Re A, -Im A], [Im A, Re A]]
Matrix realify_dictionary(const CMatrix& a);

std::vector<double> realify_vector(std::span<const cplx> v);
std::vector<cplx> complexify_vector(std::span<const double> w);

// y = A x + n with x supported on the given (on-grid angle -> amplitude)
// sources. Each of the 2M stacked real noise components is drawn iid
// N(0, noise_var); the stream consumes the real parts first, then the
// imaginary parts.
ComplexSnapshot synthesize_snapshot(const ArrayGeometry& geom, const AngularGrid& grid,
                                    const std::vector<std::pair<double, cplx>>& sources,
                                    double noise_var, Rng& rng, int k = 0);
ComplexSnapshot synthesize_snapshot(const ArrayGeometry& geom, const AngularGrid& grid,
                                    const std::vector<std::pair<double, cplx>>& sources,
                                    double noise_var, std::uint64_t seed, int k = 0);

// Realified dictionary with the precomputed products the solver reuses
// across snapshots and trials. Immutable once built; safe to share.
struct Dictionary {
  ArrayGeometry geometry;
  AngularGrid grid;
  Matrix a;        // 2M x 2N
  Matrix a_t;      // 2N x 2M
  Matrix gram;     // A^T A, 2N x 2N

  Dictionary(const ArrayGeometry& geom, const AngularGrid& g);
  // For problems posed directly on a realified matrix (tests, small cases).
  explicit Dictionary(Matrix realified);

  std::size_t meas_dim() const { return a.rows; }   // 2M
  std::size_t coef_dim() const { return a.cols; }   // 2N
};

}  // namespace doabcs
