#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "doabcs/array_model.hpp"
#include "doabcs/kernels.hpp"
#include "doabcs/linalg.hpp"
#include "test_util.hpp"

using namespace doabcs;

TEST_CASE("steering vector: broadside gives all ones") {
  const auto geom = ArrayGeometry::half_wavelength(20);
  const auto a = steering_vector(geom, 90.0);
  REQUIRE(a.size() == 20);
  for (const cplx v : a) {
    CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("steering vector: first element is always 1") {
  const auto geom = ArrayGeometry::uniform(7, 0.37);
  for (double theta : {0.0, 17.0, 45.0, 90.0, 133.0, 180.0}) {
    const auto a = steering_vector(geom, theta);
    CHECK(std::abs(a[0] - cplx(1.0, 0.0)) < 1e-15);
  }
}

TEST_CASE("steering vector: endfire alternation at half wavelength") {
  const auto geom = ArrayGeometry::half_wavelength(3);
  const auto a = steering_vector(geom, 0.0);
  CHECK(std::abs(a[0] - cplx(1, 0)) < 1e-12);
  CHECK(std::abs(a[1] - cplx(-1, 0)) < 1e-12);
  CHECK(std::abs(a[2] - cplx(1, 0)) < 1e-12);
}

TEST_CASE("steering vector: domain errors and unit modulus") {
  const auto geom = ArrayGeometry::half_wavelength(4);
  CHECK_THROWS_AS(steering_vector(geom, -0.5), std::domain_error);
  CHECK_THROWS_AS(steering_vector(geom, 180.5), std::domain_error);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const double theta = 180.0 * rng.uniform01();
    for (const cplx v : steering_vector(geom, theta)) {
      CHECK(std::abs(std::abs(v) - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("geometry invariants enforced") {
  CHECK_THROWS_AS(ArrayGeometry(2, {1.0, 2.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry(2, {0.0, 0.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry(3, {0.0, 2.0, 1.0}, 0.5), std::invalid_argument);
  CHECK_NOTHROW(ArrayGeometry(3, {0.0, 1.0, 3.0}, 0.5));  // sparse multiples are fine
}

TEST_CASE("dictionary: single broadside column and conjugate symmetry") {
  const auto geom = ArrayGeometry::half_wavelength(6);
  const auto grid = AngularGrid::uniform(1.0);
  const CMatrix a = build_dictionary(geom, grid);
  REQUIRE(a.rows == 6);
  REQUIRE(a.cols == 181);

  const std::size_t i90 = grid.index_of(90.0);
  for (std::size_t m = 0; m < a.rows; ++m) {
    CHECK(std::abs(a(m, i90) - cplx(1, 0)) < 1e-12);
  }
  for (double theta : {10.0, 44.0, 71.0}) {
    const std::size_t i = grid.index_of(theta);
    const std::size_t j = grid.index_of(180.0 - theta);
    for (std::size_t m = 0; m < a.rows; ++m) {
      CHECK(std::abs(a(m, i) - std::conj(a(m, j))) < 1e-12);
    }
  }
}

TEST_CASE("dictionary column matches direct element-by-element evaluation") {
  const auto geom = ArrayGeometry::half_wavelength(20);
  const auto grid = AngularGrid::uniform(1.0);
  const CMatrix a = build_dictionary(geom, grid);
  const std::size_t i20 = grid.index_of(20.0);
  const double c = std::cos(20.0 * M_PI / 180.0);
  for (int m = 0; m < 20; ++m) {
    const cplx expect(std::cos(M_PI * m * c), -std::sin(M_PI * m * c));
    CHECK(std::abs(a(static_cast<std::size_t>(m), i20) - expect) < 1e-12);
  }
}

TEST_CASE("realify: 1x1 block layout and real-input block diagonal") {
  CMatrix a(1, 1);
  a(0, 0) = cplx(3.0, -2.0);
  const Matrix r = realify_dictionary(a);
  REQUIRE(r.rows == 2);
  REQUIRE(r.cols == 2);
  CHECK(r(0, 0) == 3.0);
  CHECK(r(0, 1) == 2.0);
  CHECK(r(1, 0) == -2.0);
  CHECK(r(1, 1) == 3.0);

  CMatrix real_only(2, 2);
  real_only(0, 0) = 1.0;
  real_only(0, 1) = 2.0;
  real_only(1, 0) = 3.0;
  real_only(1, 1) = 4.0;
  const Matrix rb = realify_dictionary(real_only);
  CHECK(rb(0, 2) == 0.0);
  CHECK(rb(2, 0) == 0.0);
  CHECK(rb(2, 2) == 1.0);
  CHECK(rb(3, 3) == 4.0);
}

TEST_CASE("realify preserves complex linear algebra") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 5));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 5));
    CMatrix a(m, n);
    for (auto& v : a.data) v = cplx(rng.normal(), rng.normal());
    std::vector<cplx> x(n);
    for (auto& v : x) v = cplx(rng.normal(), rng.normal());

    std::vector<cplx> ax(m, cplx(0, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ax[i] += a(i, j) * x[j];

    const Matrix ar = realify_dictionary(a);
    const auto xs = realify_vector(x);
    const auto lhs = matvec(ar, xs);
    const auto rhs = realify_vector(ax);
    CHECK(testutil::max_abs_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("complexify round trip") {
  const std::vector<cplx> v{{1, 2}};
  const auto w = realify_vector(v);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 2.0);
  const auto back = complexify_vector(w);
  CHECK(back[0] == cplx(1, 2));

  CHECK_THROWS_AS(complexify_vector(std::vector<double>{1.0, 2.0, 3.0}),
                  std::invalid_argument);

  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<cplx> x(5);
    for (auto& c : x) c = cplx(rng.normal(), rng.normal());
    const auto rt = complexify_vector(realify_vector(x));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(rt[i] == x[i]);
  }
}

TEST_CASE("synthesize: noiseless cases") {
  const auto geom = ArrayGeometry::half_wavelength(20);
  const auto grid = AngularGrid::uniform(1.0);

  const auto ones = synthesize_snapshot(geom, grid, {{90.0, cplx(1, 0)}}, 0.0, 1u);
  for (const cplx v : ones.y) CHECK(std::abs(v - cplx(1, 0)) < 1e-12);

  const auto silent = synthesize_snapshot(geom, grid, {}, 0.0, 1u);
  for (const cplx v : silent.y) CHECK(std::abs(v) == 0.0);

  CHECK_THROWS_AS(synthesize_snapshot(geom, grid, {{20.4, cplx(1, 0)}}, 0.0, 1u),
                  std::domain_error);
  CHECK_THROWS_AS(synthesize_snapshot(geom, grid, {{90.0, cplx(1, 0)}}, -0.1, 1u),
                  std::domain_error);
}

TEST_CASE("synthesize: noise variance statistics over many draws") {
  const auto geom = ArrayGeometry::half_wavelength(20);
  const auto grid = AngularGrid::uniform(1.0);
  const double noise_var = 0.4;
  Rng rng(12345);
  double acc = 0.0;
  std::size_t count = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto snap = synthesize_snapshot(geom, grid, {}, noise_var, rng, k);
    for (const cplx v : snap.y) {
      acc += v.real() * v.real() + v.imag() * v.imag();
      count += 2;
    }
  }
  const double var = acc / static_cast<double>(count);
  CHECK(var > 0.95 * noise_var);
  CHECK(var < 1.05 * noise_var);
}

TEST_CASE("noiseless synthesis recovers amplitudes by least squares on the support") {
  const auto geom = ArrayGeometry::half_wavelength(20);
  const auto grid = AngularGrid::uniform(1.0);
  const cplx amp1(0.8, -0.4), amp2(-0.3, 1.1);
  const auto snap =
      synthesize_snapshot(geom, grid, {{40.0, amp1}, {123.0, amp2}}, 0.0, 9u);

  // Dense LS on the true two-column support.
  CMatrix cols(20, 2);
  const auto a1 = steering_vector(geom, 40.0);
  const auto a2 = steering_vector(geom, 123.0);
  for (std::size_t m = 0; m < 20; ++m) {
    cols(m, 0) = a1[m];
    cols(m, 1) = a2[m];
  }
  const Matrix ar = realify_dictionary(cols);
  const auto ys = realify_vector(snap.y);
  Matrix h(4, 4);
  kern::gram(ar.data.data(), ar.rows, 4, h.data.data());
  Cholesky chol(h);
  const auto rhs = matvec_t(ar, ys);
  const auto sol = chol.solve(rhs);
  const auto amps = complexify_vector(sol);
  CHECK(std::abs(amps[0] - amp1) < 1e-10);
  CHECK(std::abs(amps[1] - amp2) < 1e-10);
}

TEST_CASE("grid construction and lookup") {
  const auto grid = AngularGrid::uniform(1.0);
  CHECK(grid.size() == 181);
  CHECK(grid.angle(0) == 0.0);
  CHECK(grid.angle(180) == 180.0);
  CHECK(grid.index_of(20.0) == 20);
  CHECK(grid.nearest_index(20.4) == 20);
  CHECK_THROWS_AS(grid.index_of(20.4), std::domain_error);
  CHECK_THROWS_AS(AngularGrid::uniform(0.0), std::invalid_argument);

  const auto coarse = AngularGrid::uniform(10.0);
  CHECK(coarse.size() == 19);
}
