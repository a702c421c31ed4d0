#include "doabcs/array_model.hpp"

#include <cmath>
#include <stdexcept>

#include "doabcs/kernels.hpp"

namespace doabcs {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

ArrayGeometry::ArrayGeometry(int sensors, std::vector<double> multiples,
                             double spacing_wavelengths)
    : num_sensors(sensors),
      spacing_multiples(std::move(multiples)),
      phase_scale(2.0 * kPi * spacing_wavelengths) {
  if (num_sensors < 1) throw std::invalid_argument("geometry: need at least one sensor");
  if (spacing_multiples.size() != static_cast<std::size_t>(num_sensors)) {
    throw std::invalid_argument("geometry: one spacing multiple per sensor");
  }
  if (spacing_multiples.front() != 0.0) {
    throw std::invalid_argument("geometry: first spacing multiple must be 0");
  }
  for (std::size_t m = 1; m < spacing_multiples.size(); ++m) {
    if (!(spacing_multiples[m] > spacing_multiples[m - 1])) {
      throw std::invalid_argument("geometry: spacing multiples must be strictly increasing");
    }
  }
  if (!(spacing_wavelengths > 0.0)) {
    throw std::invalid_argument("geometry: spacing must be positive");
  }
}

ArrayGeometry ArrayGeometry::uniform(int sensors, double spacing_wavelengths) {
  std::vector<double> multiples(static_cast<std::size_t>(sensors > 0 ? sensors : 0));
  for (std::size_t m = 0; m < multiples.size(); ++m) multiples[m] = static_cast<double>(m);
  return ArrayGeometry(sensors, std::move(multiples), spacing_wavelengths);
}

AngularGrid AngularGrid::uniform(double spacing_deg) {
  if (!(spacing_deg > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
  AngularGrid g;
  g.spacing_deg = spacing_deg;
  const auto n = static_cast<std::size_t>(std::floor(180.0 / spacing_deg + 0.5)) + 1;
  if (n < 2) throw std::invalid_argument("grid: need at least two angles");
  g.angles_deg.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.angles_deg[i] = static_cast<double>(i) * spacing_deg;
  return g;
}

std::size_t AngularGrid::nearest_index(double theta_deg) const {
  std::size_t best = 0;
  double best_dist = std::abs(angles_deg[0] - theta_deg);
  for (std::size_t i = 1; i < angles_deg.size(); ++i) {
    const double d = std::abs(angles_deg[i] - theta_deg);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

std::size_t AngularGrid::index_of(double theta_deg) const {
  const std::size_t i = nearest_index(theta_deg);
  if (std::abs(angles_deg[i] - theta_deg) > 1e-9) {
    throw std::domain_error("angle is not on the grid");
  }
  return i;
}

std::vector<cplx> steering_vector(const ArrayGeometry& geom, double theta_deg) {
  if (theta_deg < 0.0 || theta_deg > 180.0) {
    throw std::domain_error("steering_vector: angle outside [0, 180] degrees");
  }
  const double c = std::cos(theta_deg * kDegToRad);
  std::vector<cplx> a(static_cast<std::size_t>(geom.num_sensors));
  for (int m = 0; m < geom.num_sensors; ++m) {
    a[static_cast<std::size_t>(m)] = std::polar(1.0, -geom.phase(m) * c);
  }
  return a;
}

CMatrix build_dictionary(const ArrayGeometry& geom, const AngularGrid& grid) {
  CMatrix a(static_cast<std::size_t>(geom.num_sensors), grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto col = steering_vector(geom, grid.angle(n));
    for (std::size_t m = 0; m < col.size(); ++m) a(m, n) = col[m];
  }
  return a;
}

Matrix realify_dictionary(const CMatrix& a) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  Matrix out(2 * m, 2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      out(i, j) = re;
      out(i, j + n) = -im;
      out(i + m, j) = im;
      out(i + m, j + n) = re;
    }
  }
  return out;
}

std::vector<double> realify_vector(std::span<const cplx> v) {
  std::vector<double> out(2 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i].real();
    out[i + v.size()] = v[i].imag();
  }
  return out;
}

std::vector<cplx> complexify_vector(std::span<const double> w) {
  if (w.size() % 2 != 0) {
    throw std::invalid_argument("complexify_vector: length must be even");
  }
  const std::size_t n = w.size() / 2;
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cplx(w[i], w[i + n]);
  return out;
}

ComplexSnapshot synthesize_snapshot(const ArrayGeometry& geom, const AngularGrid& grid,
                                    const std::vector<std::pair<double, cplx>>& sources,
                                    double noise_var, Rng& rng, int k) {
  if (noise_var < 0.0) throw std::domain_error("synthesize_snapshot: negative noise variance");
  const auto m = static_cast<std::size_t>(geom.num_sensors);
  ComplexSnapshot snap;
  snap.k = k;
  snap.y.assign(m, cplx(0.0, 0.0));
  for (const auto& [theta, amp] : sources) {
    grid.index_of(theta);  // off-grid angles are the caller's problem
    const auto a = steering_vector(geom, theta);
    for (std::size_t i = 0; i < m; ++i) snap.y[i] += amp * a[i];
  }
  if (noise_var > 0.0) {
    const double sd = std::sqrt(noise_var);
    std::vector<double> noise(2 * m);
    for (auto& v : noise) v = rng.normal(0.0, sd);
    for (std::size_t i = 0; i < m; ++i) snap.y[i] += cplx(noise[i], noise[i + m]);
  }
  return snap;
}

ComplexSnapshot synthesize_snapshot(const ArrayGeometry& geom, const AngularGrid& grid,
                                    const std::vector<std::pair<double, cplx>>& sources,
                                    double noise_var, std::uint64_t seed, int k) {
  Rng rng(seed);
  return synthesize_snapshot(geom, grid, sources, noise_var, rng, k);
}

Dictionary::Dictionary(const ArrayGeometry& geom, const AngularGrid& g)
    : geometry(geom), grid(g) {
  a = realify_dictionary(build_dictionary(geom, g));
  a_t = transpose(a);
  gram = Matrix(a.cols, a.cols);
  kern::gram(a.data.data(), a.rows, a.cols, gram.data.data());
}

Dictionary::Dictionary(Matrix realified) {
  a = std::move(realified);
  a_t = transpose(a);
  gram = Matrix(a.cols, a.cols);
  kern::gram(a.data.data(), a.rows, a.cols, gram.data.data());
}

}  // namespace doabcs
