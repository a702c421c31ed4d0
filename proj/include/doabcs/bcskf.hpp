#pragma once

// Snapshot-to-snapshot tracking of the sparse received signal: index-shift
// prediction from the expected bearing change, per-snapshot hyperparameter
// re-optimization with the prediction as prior mean, and a Kalman update.

#include <cstdint>
#include <span>
#include <vector>

#include "doabcs/array_model.hpp"
#include "doabcs/linalg.hpp"
#include "doabcs/sparse_bayes.hpp"

namespace doabcs {

// Grid-step shift applied to the signal support between snapshots. Entries
// pushed past either end of the grid saturate at the boundary index.
struct ShiftModel {
  int delta_indices = 0;
};

struct TrackState {
  std::vector<double> x;   // stacked estimate, length 2N
  Matrix cov;              // 2N x 2N
  int k = 0;
  double noise_var = 0.0;
  std::vector<double> precision;
};

struct Prediction {
  std::vector<double> x_pred;
  Matrix cov_pred;
  std::vector<double> y_pred;
  bool boundary_clamped = false;
};

// Shift both halves of a stacked vector by delta grid steps; values are
// preserved, clamped entries accumulate at the boundary index.
std::vector<double> shift_stacked(std::span<const double> x, int delta, std::size_t half,
                                  bool* clamped = nullptr);

// cov_pred = cov + P^{-1} with precisions at or above p_cap contributing 0.
Prediction predict(const TrackState& state, const ShiftModel& shift,
                   std::span<const double> precision, double p_cap, const Dictionary& dict);

std::vector<double> innovation(std::span<const double> y, std::span<const double> y_pred);

struct KalmanResult {
  std::vector<double> x;
  Matrix cov;
  Matrix gain;
};

KalmanResult kalman_update(const Dictionary& dict, std::span<const double> x_pred,
                           const Matrix& cov_pred, std::span<const double> y_innov,
                           double noise_var);

struct TrackerConfig {
  ShiftModel shift;
  SolverConfig solver;
  bool warm_start_noise_var = true;
};

struct TrackStepResult {
  TrackState state;
  SparseEstimate estimate;
  int solver_iterations = 0;
  bool solver_converged = false;
  bool boundary_clamped = false;
};

// First snapshot: plain sparse estimation with a zero prior mean seeds the
// track state with the posterior mean and covariance.
TrackStepResult init_track(const Dictionary& dict, std::span<const double> y,
                           const TrackerConfig& config);

// One tracking step. The prior mean handed to the solver is the shifted
// previous estimate; the covariance prediction uses the precisions the
// solver just re-optimized for this snapshot.
TrackStepResult track_snapshot(const TrackState& state, const Dictionary& dict,
                               std::span<const double> y, const TrackerConfig& config);

}  // namespace doabcs
