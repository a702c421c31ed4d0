#pragma once

// Seeded Monte Carlo benchmark harness: a scenario describes a moving source
// observed by a fixed array; trials run the per-snapshot estimator and/or the
// tracker on identical measurement streams and are scored by RMSE.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "doabcs/array_model.hpp"
#include "doabcs/bcskf.hpp"
#include "doabcs/sparse_bayes.hpp"

namespace doabcs {

enum class Method { baseline_rvm, modified_rvm_bcskf };

std::string method_name(Method m);

struct GeometryParams {
  int num_sensors = 20;
  double spacing_wavelengths = 0.5;
};

struct ScenarioSpec {
  std::string name = "custom";
  std::optional<double> initial_doa_deg = 90.0;  // nullopt: drawn per trial
  double doa_rate_deg = -1.0;                    // degrees per snapshot
  int num_snapshots = 20;
  std::optional<cplx> amplitude = cplx(1.0, 0.0);  // nullopt: +/-1 per trial
  double noise_var = 0.4;
  GeometryParams geometry;
  double grid_spacing_deg = 1.0;
  int num_trials = 25;
  std::uint64_t base_seed = 1;
  Method method = Method::modified_rvm_bcskf;
  SolverConfig solver;
  bool warm_start_noise_var = true;

  int shift_delta() const;  // doa_rate snapped to grid steps
  void validate() const;
};

struct SnapshotRecord {
  int trial = 0;
  int k = 0;
  double true_doa_deg = 0.0;
  std::optional<double> est_doa_deg;  // empty: recorded miss
  int num_kept = 0;
  int solver_iterations = 0;
  double solver_seconds = 0.0;
};

struct RunResult {
  Method method = Method::baseline_rvm;
  std::vector<SnapshotRecord> records;       // trial-major, snapshot-minor
  std::vector<double> rmse_per_snapshot;     // length num_snapshots
  double mean_rmse_deg = 0.0;                // mean over snapshots
  double mean_solver_seconds = 0.0;          // mean per snapshot
  std::uint64_t base_seed = 0;
};

// Root mean square DOA error over trials. In the variant taking optional
// estimates, a missing estimate is charged the distance to the grid angle
// farthest from the truth.
double rmse(std::span<const double> true_doas, std::span<const double> est_doas);
double rmse(std::span<const double> true_doas,
            std::span<const std::optional<double>> est_doas, const AngularGrid& grid);

double miss_penalty_angle(double true_doa_deg, const AngularGrid& grid);

// Per-trial randomness resolved into a concrete measurement stream. Draw
// order is fixed (initial bearing, amplitude, then per-snapshot noise), so
// every method run on the same trial seed sees identical data.
struct TrialData {
  double initial_doa_deg = 0.0;
  cplx amplitude;
  std::vector<double> true_doas_deg;
  std::vector<std::vector<double>> measurements;  // stacked, length 2M each
};

TrialData make_trial_data(const ScenarioSpec& spec, const Dictionary& dict,
                          std::uint64_t trial_seed);

// One seeded trial of one method; deterministic in trial_seed.
std::vector<SnapshotRecord> run_trial(const ScenarioSpec& spec, const Dictionary& dict,
                                      std::uint64_t trial_seed, Method method, int trial_id);

// num_threads <= 0: hardware concurrency. Results are identical for every
// thread count; trial q always uses seed base_seed + q.
RunResult run_monte_carlo(const ScenarioSpec& spec, int num_threads = 0);

struct MethodComparison {
  RunResult baseline;
  RunResult modified;
};

// Both methods on identical per-trial seeds (hence identical measurements).
MethodComparison compare_methods(const ScenarioSpec& spec, int num_threads = 0);

}  // namespace doabcs
