#include "doabcs/scenarios.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace doabcs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::string method_name(Method m) {
  return m == Method::baseline_rvm ? "baseline_rvm" : "modified_rvm_bcskf";
}

int ScenarioSpec::shift_delta() const {
  return static_cast<int>(std::lround(doa_rate_deg / grid_spacing_deg));
}

void ScenarioSpec::validate() const {
  if (num_snapshots < 1) throw std::invalid_argument("scenario: num_snapshots must be >= 1");
  if (num_trials < 1) throw std::invalid_argument("scenario: num_trials must be >= 1");
  if (noise_var < 0.0) throw std::invalid_argument("scenario: negative noise variance");
  if (geometry.num_sensors < 1) throw std::invalid_argument("scenario: need sensors");
  if (!(grid_spacing_deg > 0.0)) throw std::invalid_argument("scenario: bad grid spacing");
  const AngularGrid grid = AngularGrid::uniform(grid_spacing_deg);
  if (std::abs(shift_delta()) >= static_cast<int>(grid.size())) {
    throw std::invalid_argument("scenario: DOA rate exceeds the grid span");
  }
  if (initial_doa_deg) {
    grid.index_of(*initial_doa_deg);  // must sit on the grid
  }
}

double rmse(std::span<const double> true_doas, std::span<const double> est_doas) {
  if (true_doas.size() != est_doas.size() || true_doas.empty()) {
    throw std::invalid_argument("rmse: need equal, nonzero lengths");
  }
  double acc = 0.0;
  for (std::size_t q = 0; q < true_doas.size(); ++q) {
    const double e = true_doas[q] - est_doas[q];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(true_doas.size()));
}

double miss_penalty_angle(double true_doa_deg, const AngularGrid& grid) {
  const double lo = grid.angles_deg.front();
  const double hi = grid.angles_deg.back();
  return (hi - true_doa_deg >= true_doa_deg - lo) ? hi : lo;
}

double rmse(std::span<const double> true_doas,
            std::span<const std::optional<double>> est_doas, const AngularGrid& grid) {
  if (true_doas.size() != est_doas.size() || true_doas.empty()) {
    throw std::invalid_argument("rmse: need equal, nonzero lengths");
  }
  double acc = 0.0;
  for (std::size_t q = 0; q < true_doas.size(); ++q) {
    const double est =
        est_doas[q] ? *est_doas[q] : miss_penalty_angle(true_doas[q], grid);
    const double e = true_doas[q] - est;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(true_doas.size()));
}

namespace {

// Estimated bearing for scoring: the kept index with the largest energy.
std::optional<double> scored_doa(const SparseEstimate& est, const AngularGrid& grid) {
  if (est.kept_indices.empty()) return std::nullopt;
  std::size_t best = est.kept_indices.front();
  double best_energy = std::norm(est.x_opt[best]);
  for (const std::size_t i : est.kept_indices) {
    const double e = std::norm(est.x_opt[i]);
    if (e > best_energy) {
      best = i;
      best_energy = e;
    }
  }
  return grid.angle(best);
}

}  // namespace

TrialData make_trial_data(const ScenarioSpec& spec, const Dictionary& dict,
                          std::uint64_t trial_seed) {
  const AngularGrid& grid = dict.grid;
  Rng rng(trial_seed);

  TrialData data;
  if (spec.initial_doa_deg) {
    data.initial_doa_deg = *spec.initial_doa_deg;
  } else {
    // Uniform over grid angles keeping the whole track inside the grid.
    const double span = spec.doa_rate_deg * (spec.num_snapshots - 1);
    const double lo_angle = std::max(0.0, -span);
    const double hi_angle = std::min(180.0, 180.0 - span);
    const auto lo = static_cast<std::int64_t>(std::ceil(lo_angle / spec.grid_spacing_deg - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(hi_angle / spec.grid_spacing_deg + 1e-9));
    data.initial_doa_deg = grid.angle(static_cast<std::size_t>(rng.uniform_int(lo, hi)));
  }
  if (spec.amplitude) {
    data.amplitude = *spec.amplitude;
  } else {
    data.amplitude = (rng.uniform01() < 0.5) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
  }

  data.true_doas_deg.resize(static_cast<std::size_t>(spec.num_snapshots));
  data.measurements.reserve(data.true_doas_deg.size());
  for (int k = 0; k < spec.num_snapshots; ++k) {
    const double theta_k = grid.angle(
        grid.nearest_index(data.initial_doa_deg + spec.doa_rate_deg * k));
    data.true_doas_deg[static_cast<std::size_t>(k)] = theta_k;
    const ComplexSnapshot snap = synthesize_snapshot(
        dict.geometry, grid, {{theta_k, data.amplitude}}, spec.noise_var, rng, k);
    data.measurements.push_back(realify_vector(snap.y));
  }
  return data;
}

std::vector<SnapshotRecord> run_trial(const ScenarioSpec& spec, const Dictionary& dict,
                                      std::uint64_t trial_seed, Method method,
                                      int trial_id) {
  const AngularGrid& grid = dict.grid;
  const TrialData data = make_trial_data(spec, dict, trial_seed);
  const std::vector<double>& true_doas = data.true_doas_deg;

  TrackerConfig tracker;
  tracker.shift.delta_indices = spec.shift_delta();
  tracker.solver = spec.solver;
  tracker.warm_start_noise_var = spec.warm_start_noise_var;

  std::vector<SnapshotRecord> records;
  records.reserve(true_doas.size());
  TrackState track_state;
  bool track_alive = false;

  for (int k = 0; k < spec.num_snapshots; ++k) {
    SnapshotRecord rec;
    rec.trial = trial_id;
    rec.k = k;
    rec.true_doa_deg = true_doas[static_cast<std::size_t>(k)];
    const std::vector<double>& y = data.measurements[static_cast<std::size_t>(k)];

    try {
      if (method == Method::baseline_rvm) {
        SparseProblem problem(dict, y, std::vector<double>(dict.coef_dim(), 0.0));
        const auto t0 = Clock::now();
        const RvmResult res = run_modified_rvm(problem, spec.solver);
        rec.solver_seconds = seconds_since(t0);
        rec.solver_iterations = res.state.iterations;
        rec.num_kept = static_cast<int>(res.estimate.kept_indices.size());
        rec.est_doa_deg = scored_doa(res.estimate, grid);
      } else {
        const auto t0 = Clock::now();
        const TrackStepResult step = (k == 0 || !track_alive)
                                         ? init_track(dict, y, tracker)
                                         : track_snapshot(track_state, dict, y, tracker);
        rec.solver_seconds = seconds_since(t0);
        rec.solver_iterations = step.solver_iterations;
        rec.num_kept = static_cast<int>(step.estimate.kept_indices.size());
        rec.est_doa_deg = scored_doa(step.estimate, grid);
        track_state = step.state;
        track_alive = true;
      }
    } catch (const SolverError&) {
      // A failed snapshot is scored as a miss; the trial carries on. The
      // tracker restarts from a fresh initialization on the next snapshot.
      rec.est_doa_deg = std::nullopt;
      track_alive = false;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

RunResult aggregate(const ScenarioSpec& spec, const Dictionary& dict, Method method,
                    std::vector<std::vector<SnapshotRecord>>&& per_trial) {
  RunResult out;
  out.method = method;
  out.base_seed = spec.base_seed;
  const auto k_count = static_cast<std::size_t>(spec.num_snapshots);
  const auto q_count = static_cast<std::size_t>(spec.num_trials);

  out.records.reserve(k_count * q_count);
  for (auto& trial : per_trial)
    for (auto& rec : trial) out.records.push_back(rec);

  out.rmse_per_snapshot.resize(k_count);
  std::vector<double> truths(q_count);
  std::vector<std::optional<double>> ests(q_count);
  double time_acc = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t q = 0; q < q_count; ++q) {
      const SnapshotRecord& rec = per_trial[q][k];
      truths[q] = rec.true_doa_deg;
      ests[q] = rec.est_doa_deg;
      time_acc += rec.solver_seconds;
    }
    out.rmse_per_snapshot[k] = rmse(truths, ests, dict.grid);
  }
  double rmse_acc = 0.0;
  for (const double v : out.rmse_per_snapshot) rmse_acc += v;
  out.mean_rmse_deg = rmse_acc / static_cast<double>(k_count);
  out.mean_solver_seconds = time_acc / static_cast<double>(k_count * q_count);
  return out;
}

RunResult run_method(const ScenarioSpec& spec, const Dictionary& dict, Method method,
                     int num_threads) {
  const auto q_count = static_cast<std::size_t>(spec.num_trials);
  std::vector<std::vector<SnapshotRecord>> per_trial(q_count);

  unsigned threads = num_threads > 0 ? static_cast<unsigned>(num_threads)
                                     : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min(threads, static_cast<unsigned>(q_count)));

  if (threads == 1) {
    for (std::size_t q = 0; q < q_count; ++q) {
      per_trial[q] = run_trial(spec, dict, spec.base_seed + q, method, static_cast<int>(q));
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t q = next.fetch_add(1);
        if (q >= q_count) return;
        per_trial[q] =
            run_trial(spec, dict, spec.base_seed + q, method, static_cast<int>(q));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return aggregate(spec, dict, method, std::move(per_trial));
}

}  // namespace

RunResult run_monte_carlo(const ScenarioSpec& spec, int num_threads) {
  spec.validate();
  const AngularGrid grid = AngularGrid::uniform(spec.grid_spacing_deg);
  const Dictionary dict(
      ArrayGeometry::uniform(spec.geometry.num_sensors, spec.geometry.spacing_wavelengths),
      grid);
  return run_method(spec, dict, spec.method, num_threads);
}

MethodComparison compare_methods(const ScenarioSpec& spec, int num_threads) {
  spec.validate();
  const AngularGrid grid = AngularGrid::uniform(spec.grid_spacing_deg);
  const Dictionary dict(
      ArrayGeometry::uniform(spec.geometry.num_sensors, spec.geometry.spacing_wavelengths),
      grid);
  MethodComparison cmp;
  cmp.baseline = run_method(spec, dict, Method::baseline_rvm, num_threads);
  cmp.modified = run_method(spec, dict, Method::modified_rvm_bcskf, num_threads);
  return cmp;
}

}  // namespace doabcs
