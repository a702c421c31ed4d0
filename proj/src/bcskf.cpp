#include "doabcs/bcskf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doabcs/kernels.hpp"

namespace doabcs {

std::vector<double> shift_stacked(std::span<const double> x, int delta, std::size_t half,
                                  bool* clamped) {
  if (x.size() != 2 * half) throw std::invalid_argument("shift: bad stacked length");
  if (static_cast<std::size_t>(std::abs(delta)) >= half) {
    throw std::invalid_argument("shift: |delta| must be smaller than the grid");
  }
  std::vector<double> out(x.size(), 0.0);
  bool any_clamped = false;
  for (std::size_t h = 0; h < 2; ++h) {
    const std::size_t base = h * half;
    for (std::size_t i = 0; i < half; ++i) {
      const double v = x[base + i];
      if (v == 0.0) continue;
      long j = static_cast<long>(i) + delta;
      if (j < 0) {
        j = 0;
        any_clamped = true;
      } else if (j >= static_cast<long>(half)) {
        j = static_cast<long>(half) - 1;
        any_clamped = true;
      }
      out[base + static_cast<std::size_t>(j)] += v;
    }
  }
  if (clamped) *clamped = any_clamped;
  return out;
}

Prediction predict(const TrackState& state, const ShiftModel& shift,
                   std::span<const double> precision, double p_cap, const Dictionary& dict) {
  const std::size_t n2 = dict.coef_dim();
  if (state.x.size() != n2 || precision.size() != n2) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  Prediction pred;
  pred.x_pred = shift_stacked(state.x, shift.delta_indices, n2 / 2, &pred.boundary_clamped);
  pred.cov_pred = state.cov;
  for (std::size_t n = 0; n < n2; ++n) {
    if (precision[n] < p_cap) pred.cov_pred(n, n) += 1.0 / precision[n];
  }
  pred.y_pred = matvec(dict.a, pred.x_pred);
  return pred;
}

std::vector<double> innovation(std::span<const double> y, std::span<const double> y_pred) {
  if (y.size() != y_pred.size()) throw std::invalid_argument("innovation: length mismatch");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - y_pred[i];
  return out;
}

KalmanResult kalman_update(const Dictionary& dict, std::span<const double> x_pred,
                           const Matrix& cov_pred, std::span<const double> y_innov,
                           double noise_var) {
  const std::size_t m2 = dict.meas_dim();
  const std::size_t n2 = dict.coef_dim();
  if (x_pred.size() != n2 || y_innov.size() != m2 || cov_pred.rows != n2 ||
      cov_pred.cols != n2) {
    throw std::invalid_argument("kalman_update: dimension mismatch");
  }
  if (!(noise_var > 0.0)) throw std::invalid_argument("kalman_update: noise_var <= 0");

  // t = A cov_pred (m2 x n2); innovation covariance s_in = noise I + t A^T.
  const Matrix t = matmul(dict.a, cov_pred);
  Matrix s_in = matmul(t, dict.a_t);
  for (std::size_t i = 0; i < m2; ++i) s_in(i, i) += noise_var;

  Cholesky chol(s_in);

  // gain = cov_pred A^T s_in^{-1} = (s_in^{-1} t)^T because cov_pred is
  // symmetric.
  Matrix gain_t(m2, n2);
  {
    std::vector<double> col(m2);
    for (std::size_t j = 0; j < n2; ++j) {
      for (std::size_t i = 0; i < m2; ++i) col[i] = t(i, j);
      const std::vector<double> sol = chol.solve(col);
      for (std::size_t i = 0; i < m2; ++i) gain_t(i, j) = sol[i];
    }
  }

  KalmanResult out;
  out.gain = transpose(gain_t);
  out.x.assign(x_pred.begin(), x_pred.end());
  std::vector<double> corr = matvec(out.gain, y_innov);
  for (std::size_t n = 0; n < n2; ++n) out.x[n] += corr[n];

  // cov = cov_pred - gain t, then symmetrized to suppress drift.
  out.cov = cov_pred;
  Matrix gt(n2, n2);
  kern::gemm_acc(out.gain.data.data(), t.data.data(), gt.data.data(), n2, m2, n2);
  for (std::size_t i = 0; i < n2 * n2; ++i) out.cov.data[i] -= gt.data[i];
  symmetrize(out.cov);
  return out;
}

namespace {

// Thresholds the updated estimate and sparsifies the carried state to the
// surviving support. Feeding the dense estimate forward lets spurious peaks
// ride along in the prior mean of every later snapshot and the track drifts
// onto them; zeroing the discarded signals keeps the propagated belief
// consistent with the reported one.
TrackStepResult readout(TrackState state, const RvmResult& rvm, const Dictionary& dict,
                        const SolverConfig& solver, bool boundary_clamped) {
  TrackStepResult out;
  out.solver_iterations = rvm.state.iterations;
  out.solver_converged = rvm.state.converged;
  out.boundary_clamped = boundary_clamped;

  SparseEstimate est;
  est.sigma2_opt = rvm.state.noise_var;
  est.p_opt = rvm.state.precision;
  est.log_evidence = rvm.state.log_evidence;
  est.x_opt = complexify_vector(state.x);
  const ThresholdResult thr = threshold_signals(est.x_opt, solver.eta);
  est.kept_indices = thr.kept_indices;
  const std::size_t half = est.x_opt.size();
  std::vector<std::uint8_t> keep(half, 0);
  for (const std::size_t i : thr.kept_indices) keep[i] = 1;
  for (std::size_t i = 0; i < half; ++i) {
    if (!keep[i]) {
      est.x_opt[i] = cplx(0.0, 0.0);
      state.x[i] = 0.0;
      state.x[i + half] = 0.0;
    }
  }
  if (dict.grid.size() == half) {
    est.doas_deg = estimate_doas(est.kept_indices, dict.grid);
  }
  out.estimate = std::move(est);
  out.state = std::move(state);
  return out;
}

}  // namespace

TrackStepResult init_track(const Dictionary& dict, std::span<const double> y,
                           const TrackerConfig& config) {
  SparseProblem problem(dict, std::vector<double>(y.begin(), y.end()),
                        std::vector<double>(dict.coef_dim(), 0.0));
  const RvmResult rvm = run_modified_rvm(problem, config.solver);

  const PosteriorResult post = posterior(problem, rvm.state.precision, rvm.state.noise_var);
  TrackState state;
  state.x = post.mean;
  state.cov = post.cov;
  state.k = 0;
  state.noise_var = rvm.state.noise_var;
  state.precision = rvm.state.precision;
  return readout(std::move(state), rvm, dict, config.solver, false);
}

TrackStepResult track_snapshot(const TrackState& state, const Dictionary& dict,
                               std::span<const double> y, const TrackerConfig& config) {
  const std::size_t n2 = dict.coef_dim();

  // Prediction with the previous snapshot's precisions; only the shifted
  // mean and predicted measurement are consumed from it, the covariance
  // prediction is redone below with the re-optimized precisions.
  Prediction pred =
      predict(state, config.shift, state.precision, config.solver.p_cap, dict);

  SolverConfig solver = config.solver;
  if (config.warm_start_noise_var) solver.sigma2_init = state.noise_var;
  SparseProblem problem(dict, std::vector<double>(y.begin(), y.end()), pred.x_pred);
  const RvmResult rvm = run_modified_rvm(problem, solver);

  Matrix cov_pred = state.cov;
  for (std::size_t n = 0; n < n2; ++n) {
    if (rvm.state.precision[n] < config.solver.p_cap) {
      cov_pred(n, n) += 1.0 / rvm.state.precision[n];
    }
  }

  const std::vector<double> y_innov = innovation(y, pred.y_pred);
  KalmanResult kf = kalman_update(dict, pred.x_pred, cov_pred, y_innov, rvm.state.noise_var);

  TrackState next;
  next.x = std::move(kf.x);
  next.cov = std::move(kf.cov);
  next.k = state.k + 1;
  next.noise_var = rvm.state.noise_var;
  next.precision = rvm.state.precision;
  return readout(std::move(next), rvm, dict, config.solver, pred.boundary_clamped);
}

}  // namespace doabcs
