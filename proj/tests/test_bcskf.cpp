#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "doabcs/bcskf.hpp"
#include "doabcs/kernels.hpp"
#include "doabcs/scenarios.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace doabcs;

namespace {

TrackState make_state(const Dictionary& dict, Rng& rng) {
  const std::size_t n2 = dict.coef_dim();
  TrackState st;
  st.x = testutil::random_vector(rng, n2);
  const Matrix b = testutil::random_matrix(rng, n2 + 2, n2);
  st.cov = Matrix(n2, n2);
  kern::gram(b.data.data(), n2 + 2, n2, st.cov.data.data());
  for (std::size_t i = 0; i < n2; ++i) st.cov(i, i) += 0.1;
  st.noise_var = 0.5;
  st.precision = testutil::random_precisions(rng, n2, 0.5, 5.0);
  return st;
}

}  // namespace

TEST_CASE("shift: identity, value preservation, round trip") {
  const std::vector<double> x{0.0, 1.0, 2.0, 0.0, 0.0, 0.5, -1.0, 0.0};
  bool clamped = false;
  const auto same = shift_stacked(x, 0, 4, &clamped);
  CHECK(same == x);
  CHECK_FALSE(clamped);

  const auto right = shift_stacked(x, 1, 4, &clamped);
  CHECK_FALSE(clamped);
  CHECK(right[2] == 1.0);
  CHECK(right[3] == 2.0);
  CHECK(right[6] == 0.5);

  const auto back = shift_stacked(right, -1, 4, &clamped);
  CHECK(back == x);
}

TEST_CASE("shift: worked example, support index 100 moves to 102") {
  const std::size_t half = 181;
  std::vector<double> x(2 * half, 0.0);
  x[100] = 0.7;
  x[100 + half] = -0.2;
  const auto out = shift_stacked(x, 2, half);
  CHECK(out[102] == 0.7);
  CHECK(out[102 + half] == -0.2);
  CHECK(out[100] == 0.0);
}

TEST_CASE("shift: clamping at the grid boundary") {
  const std::size_t half = 5;
  std::vector<double> x(10, 0.0);
  x[1] = 1.0;
  bool clamped = false;
  const auto out = shift_stacked(x, -3, half, &clamped);
  CHECK(clamped);
  CHECK(out[0] == 1.0);

  CHECK_THROWS_AS(shift_stacked(x, 5, half), std::invalid_argument);
  CHECK_THROWS_AS(shift_stacked(x, 1, 4), std::invalid_argument);
}

TEST_CASE("predict: covariance gains inverse precisions except at the cap") {
  Rng rng(21);
  Dictionary dict(testutil::random_matrix(rng, 4, 8));
  TrackState st = make_state(dict, rng);
  st.precision[3] = 1e12;  // pinned: contributes nothing
  ShiftModel shift{0};
  const auto pred = predict(st, shift, st.precision, 1e12, dict);
  CHECK(pred.x_pred == st.x);
  for (std::size_t n = 0; n < 8; ++n) {
    const double expect =
        st.cov(n, n) + (st.precision[n] < 1e12 ? 1.0 / st.precision[n] : 0.0);
    CHECK(pred.cov_pred(n, n) == doctest::Approx(expect).epsilon(1e-12));
  }
  const auto y_ref = oracle::matvec_naive(dict.a, pred.x_pred);
  CHECK(testutil::max_abs_diff(pred.y_pred, y_ref) < 1e-12);
}

TEST_CASE("innovation: elementwise difference with shape check") {
  const std::vector<double> y{1.0, 2.0, 3.0};
  CHECK(innovation(y, y) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(innovation(y, std::vector<double>{0.0, 0.0, 0.0}) == y);
  Rng rng(5);
  const auto a = testutil::random_vector(rng, 6);
  const auto b = testutil::random_vector(rng, 6);
  const auto d = innovation(a, b);
  for (std::size_t i = 0; i < 6; ++i) CHECK(d[i] == a[i] - b[i]);
  CHECK_THROWS_AS(innovation(y, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("kalman update: zero innovation leaves the prediction alone") {
  Rng rng(31);
  Dictionary dict(testutil::random_matrix(rng, 3, 4));
  TrackState st = make_state(dict, rng);
  const std::vector<double> zero(3, 0.0);
  const auto res = kalman_update(dict, st.x, st.cov, zero, 0.5);
  CHECK(testutil::max_abs_diff(res.x, st.x) == 0.0);
}

TEST_CASE("kalman update: huge noise variance freezes the state") {
  Rng rng(32);
  Dictionary dict(testutil::random_matrix(rng, 3, 4));
  TrackState st = make_state(dict, rng);
  const auto innov = testutil::random_vector(rng, 3);
  const auto res = kalman_update(dict, st.x, st.cov, innov, 1e12);
  CHECK(testutil::max_abs_diff(res.x, st.x) < 1e-9);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(res.cov(i, j) - st.cov(i, j)) < 1e-9);
}

TEST_CASE("kalman update matches the dense textbook filter") {
  Rng rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    Dictionary dict(testutil::random_matrix(rng, 3, 4));
    TrackState st = make_state(dict, rng);
    const auto innov = testutil::random_vector(rng, 3);
    const double s2 = 0.3 + rng.uniform01();

    const auto got = kalman_update(dict, st.x, st.cov, innov, s2);
    const auto ref = oracle::kalman_update_dense(dict.a, st.x, st.cov, innov, s2);
    CHECK(testutil::max_abs_diff(got.x, ref.x) < 1e-9);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::abs(got.cov(i, j) - ref.cov(i, j)) < 1e-9);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(got.gain(i, j) - ref.gain(i, j)) < 1e-9);
  }
}

TEST_CASE("kalman update: posterior covariance is PSD and below the prediction") {
  Rng rng(34);
  for (int rep = 0; rep < 10; ++rep) {
    Dictionary dict(testutil::random_matrix(rng, 3, 4));
    TrackState st = make_state(dict, rng);
    const auto innov = testutil::random_vector(rng, 3);
    const auto res = kalman_update(dict, st.x, st.cov, innov, 0.7);

    const auto eig = oracle::sym_eigenvalues(res.cov);
    double scale = 0.0;
    for (const double v : res.cov.data) scale = std::max(scale, std::abs(v));
    CHECK(eig.front() >= -1e-9 * scale);

    Matrix gap = st.cov;
    for (std::size_t i = 0; i < gap.data.size(); ++i) gap.data[i] -= res.cov.data[i];
    const auto gap_eig = oracle::sym_eigenvalues(gap);
    CHECK(gap_eig.front() >= -1e-9 * scale);
  }
}

TEST_CASE("track_snapshot: noiseless model-matched track is exact") {
  const auto geom = ArrayGeometry::half_wavelength(12);
  const auto grid = AngularGrid::uniform(2.0);
  Dictionary dict(geom, grid);
  TrackerConfig cfg;
  cfg.shift.delta_indices = 1;  // +2 degrees per snapshot on a 2-degree grid

  double theta = 60.0;
  Rng rng(900);
  TrackState st;
  for (int k = 0; k < 6; ++k) {
    const auto snap = synthesize_snapshot(geom, grid, {{theta, cplx(1, 0)}}, 0.0, rng, k);
    const auto y = realify_vector(snap.y);
    const TrackStepResult step =
        (k == 0) ? init_track(dict, y, cfg) : track_snapshot(st, dict, y, cfg);
    st = step.state;
    REQUIRE_FALSE(step.estimate.kept_indices.empty());
    std::size_t best = step.estimate.kept_indices[0];
    double be = -1.0;
    for (const std::size_t i : step.estimate.kept_indices) {
      const double e = std::norm(step.estimate.x_opt[i]);
      if (e > be) {
        be = e;
        best = i;
      }
    }
    CHECK(grid.angle(best) == theta);
    theta += 2.0;
  }
}

TEST_CASE("track step count and covariance health on a noisy track") {
  const auto geom = ArrayGeometry::half_wavelength(10);
  const auto grid = AngularGrid::uniform(5.0);
  Dictionary dict(geom, grid);
  TrackerConfig cfg;
  cfg.shift.delta_indices = 0;
  Rng rng(911);
  TrackState st;
  for (int k = 0; k < 4; ++k) {
    const auto snap = synthesize_snapshot(geom, grid, {{90.0, cplx(1, 0)}}, 0.4, rng, k);
    const auto y = realify_vector(snap.y);
    const TrackStepResult step =
        (k == 0) ? init_track(dict, y, cfg) : track_snapshot(st, dict, y, cfg);
    st = step.state;
    CHECK(st.k == k);
    const auto eig = oracle::sym_eigenvalues(st.cov);
    double scale = 1e-12;
    for (const double v : st.cov.data) scale = std::max(scale, std::abs(v));
    CHECK(eig.front() >= -1e-9 * scale);
  }
}

TEST_CASE("init_track equals the static estimator with a zero prior mean") {
  const auto geom = ArrayGeometry::half_wavelength(10);
  const auto grid = AngularGrid::uniform(5.0);
  Dictionary dict(geom, grid);
  Rng rng(912);
  const auto snap = synthesize_snapshot(geom, grid, {{45.0, cplx(1, 0)}}, 0.4, rng);
  const auto y = realify_vector(snap.y);

  TrackerConfig cfg;
  const auto step = init_track(dict, y, cfg);

  SparseProblem prob(dict, y, std::vector<double>(dict.coef_dim(), 0.0));
  const auto rvm = run_modified_rvm(prob, cfg.solver);
  CHECK(step.estimate.kept_indices == rvm.estimate.kept_indices);
  CHECK(step.estimate.sigma2_opt == doctest::Approx(rvm.estimate.sigma2_opt));
  CHECK(step.state.k == 0);
}

TEST_CASE("endfire tracking beats the per-snapshot baseline on paired seeds") {
  ScenarioSpec spec;
  spec.initial_doa_deg = 20.0;
  spec.doa_rate_deg = -1.0;
  spec.num_snapshots = 12;
  spec.amplitude = cplx(1, 0);
  spec.noise_var = 0.4;
  spec.num_trials = 6;
  spec.base_seed = 2400;
  const MethodComparison cmp = compare_methods(spec, 2);
  MESSAGE("paired endfire: baseline ", cmp.baseline.mean_rmse_deg, " vs modified ",
          cmp.modified.mean_rmse_deg);
  CHECK(cmp.modified.mean_rmse_deg < cmp.baseline.mean_rmse_deg);
}
