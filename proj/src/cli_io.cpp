#include "doabcs/cli_io.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace doabcs::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw std::runtime_error("config: " + where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) config_error(where, "unknown key \"" + key + "\"");
  }
}

double require_number(const json& v, const std::string& where) {
  if (!v.is_number()) config_error(where, "expected a number");
  return v.get<double>();
}

int require_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) config_error(where, "expected an integer");
  return v.get<int>();
}

void parse_solver(const json& obj, SolverConfig& solver) {
  reject_unknown_keys(obj,
                      {"max_iters", "tol", "p_init", "sigma2_init", "p_cap", "denom_eps",
                       "sigma2_floor", "noise_dof_min", "eta", "update_mode",
                       "noise_schedule"},
                      "solver");
  if (obj.contains("max_iters")) solver.max_iters = require_int(obj["max_iters"], "solver.max_iters");
  if (obj.contains("tol")) solver.tol = require_number(obj["tol"], "solver.tol");
  if (obj.contains("p_init")) solver.p_init = require_number(obj["p_init"], "solver.p_init");
  if (obj.contains("sigma2_init")) solver.sigma2_init = require_number(obj["sigma2_init"], "solver.sigma2_init");
  if (obj.contains("p_cap")) solver.p_cap = require_number(obj["p_cap"], "solver.p_cap");
  if (obj.contains("denom_eps")) solver.denom_eps = require_number(obj["denom_eps"], "solver.denom_eps");
  if (obj.contains("sigma2_floor")) solver.sigma2_floor = require_number(obj["sigma2_floor"], "solver.sigma2_floor");
  if (obj.contains("eta")) solver.eta = require_number(obj["eta"], "solver.eta");
  if (obj.contains("noise_dof_min")) {
    solver.noise_dof_min = require_number(obj["noise_dof_min"], "solver.noise_dof_min");
  }
  if (obj.contains("update_mode")) {
    const std::string mode = obj["update_mode"].get<std::string>();
    if (mode == "paper") {
      solver.update_mode = PrecisionUpdate::paper;
    } else if (mode == "exact") {
      solver.update_mode = PrecisionUpdate::exact;
    } else {
      config_error("solver.update_mode", "expected \"paper\" or \"exact\"");
    }
  }
  if (obj.contains("noise_schedule")) {
    const std::string sched = obj["noise_schedule"].get<std::string>();
    if (sched == "per_iteration") {
      solver.noise_schedule = NoiseSchedule::per_iteration;
    } else if (sched == "final_thresholded") {
      solver.noise_schedule = NoiseSchedule::final_thresholded;
    } else {
      config_error("solver.noise_schedule",
                   "expected \"per_iteration\" or \"final_thresholded\"");
    }
  }
}

json solver_to_json(const SolverConfig& s) {
  return json{{"max_iters", s.max_iters},
              {"tol", s.tol},
              {"p_init", s.p_init},
              {"sigma2_init", s.sigma2_init},
              {"p_cap", s.p_cap},
              {"denom_eps", s.denom_eps},
              {"sigma2_floor", s.sigma2_floor},
              {"noise_dof_min", s.noise_dof_min},
              {"eta", s.eta},
              {"update_mode", s.update_mode == PrecisionUpdate::paper ? "paper" : "exact"},
              {"noise_schedule", s.noise_schedule == NoiseSchedule::per_iteration
                                     ? "per_iteration"
                                     : "final_thresholded"}};
}

}  // namespace

ScenarioFile parse_scenario_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw std::runtime_error("config: top level must be an object");

  reject_unknown_keys(root,
                      {"name", "initial_doa_deg", "doa_rate_deg", "num_snapshots",
                       "signal_amplitude", "noise_var", "geometry", "grid_spacing_deg",
                       "num_trials", "base_seed", "method", "solver", "tracker",
                       "output_dir", "reference"},
                      "top level");

  ScenarioFile file;
  ScenarioSpec& spec = file.spec;

  if (root.contains("name")) spec.name = root["name"].get<std::string>();
  if (root.contains("initial_doa_deg")) {
    const json& v = root["initial_doa_deg"];
    if (v.is_string()) {
      if (v.get<std::string>() != "random") {
        config_error("initial_doa_deg", "expected a number or \"random\"");
      }
      spec.initial_doa_deg = std::nullopt;
    } else {
      spec.initial_doa_deg = require_number(v, "initial_doa_deg");
    }
  }
  if (root.contains("doa_rate_deg")) spec.doa_rate_deg = require_number(root["doa_rate_deg"], "doa_rate_deg");
  if (root.contains("num_snapshots")) spec.num_snapshots = require_int(root["num_snapshots"], "num_snapshots");
  if (root.contains("signal_amplitude")) {
    const json& v = root["signal_amplitude"];
    if (v.is_string()) {
      if (v.get<std::string>() != "random_pm1") {
        config_error("signal_amplitude", "expected a number, [re, im], or \"random_pm1\"");
      }
      spec.amplitude = std::nullopt;
    } else if (v.is_array()) {
      if (v.size() != 2) config_error("signal_amplitude", "array form must be [re, im]");
      spec.amplitude = cplx(require_number(v[0], "signal_amplitude[0]"),
                            require_number(v[1], "signal_amplitude[1]"));
    } else {
      spec.amplitude = cplx(require_number(v, "signal_amplitude"), 0.0);
    }
  }
  if (root.contains("noise_var")) spec.noise_var = require_number(root["noise_var"], "noise_var");
  if (root.contains("geometry")) {
    const json& g = root["geometry"];
    reject_unknown_keys(g, {"num_sensors", "spacing_wavelengths"}, "geometry");
    if (g.contains("num_sensors")) spec.geometry.num_sensors = require_int(g["num_sensors"], "geometry.num_sensors");
    if (g.contains("spacing_wavelengths")) {
      spec.geometry.spacing_wavelengths = require_number(g["spacing_wavelengths"], "geometry.spacing_wavelengths");
    }
  }
  if (root.contains("grid_spacing_deg")) spec.grid_spacing_deg = require_number(root["grid_spacing_deg"], "grid_spacing_deg");
  if (root.contains("num_trials")) spec.num_trials = require_int(root["num_trials"], "num_trials");
  if (root.contains("base_seed")) spec.base_seed = root["base_seed"].get<std::uint64_t>();
  if (root.contains("method")) {
    const std::string m = root["method"].get<std::string>();
    if (m == "baseline_rvm") {
      file.mode = MethodMode::baseline;
      spec.method = Method::baseline_rvm;
    } else if (m == "modified_rvm_bcskf") {
      file.mode = MethodMode::modified;
      spec.method = Method::modified_rvm_bcskf;
    } else if (m == "both") {
      file.mode = MethodMode::both;
    } else {
      config_error("method", "expected \"baseline_rvm\", \"modified_rvm_bcskf\" or \"both\"");
    }
  }
  if (root.contains("solver")) parse_solver(root["solver"], spec.solver);
  if (root.contains("tracker")) {
    const json& t = root["tracker"];
    reject_unknown_keys(t, {"warm_start_sigma2"}, "tracker");
    if (t.contains("warm_start_sigma2")) {
      spec.warm_start_noise_var = t["warm_start_sigma2"].get<bool>();
    }
  }
  if (root.contains("output_dir")) file.output_dir = root["output_dir"].get<std::string>();
  if (root.contains("reference")) file.reference_json = root["reference"].dump();

  spec.validate();
  return file;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str());
}

std::string scenario_to_json(const ScenarioFile& file) {
  const ScenarioSpec& spec = file.spec;
  json root;
  root["name"] = spec.name;
  if (spec.initial_doa_deg) {
    root["initial_doa_deg"] = *spec.initial_doa_deg;
  } else {
    root["initial_doa_deg"] = "random";
  }
  root["doa_rate_deg"] = spec.doa_rate_deg;
  root["num_snapshots"] = spec.num_snapshots;
  if (spec.amplitude) {
    if (spec.amplitude->imag() == 0.0) {
      root["signal_amplitude"] = spec.amplitude->real();
    } else {
      root["signal_amplitude"] = json::array({spec.amplitude->real(), spec.amplitude->imag()});
    }
  } else {
    root["signal_amplitude"] = "random_pm1";
  }
  root["noise_var"] = spec.noise_var;
  root["geometry"] = json{{"num_sensors", spec.geometry.num_sensors},
                          {"spacing_wavelengths", spec.geometry.spacing_wavelengths}};
  root["grid_spacing_deg"] = spec.grid_spacing_deg;
  root["num_trials"] = spec.num_trials;
  root["base_seed"] = spec.base_seed;
  switch (file.mode) {
    case MethodMode::baseline: root["method"] = "baseline_rvm"; break;
    case MethodMode::modified: root["method"] = "modified_rvm_bcskf"; break;
    case MethodMode::both: root["method"] = "both"; break;
  }
  root["solver"] = solver_to_json(spec.solver);
  root["tracker"] = json{{"warm_start_sigma2", spec.warm_start_noise_var}};
  root["output_dir"] = file.output_dir;
  if (!file.reference_json.empty()) root["reference"] = json::parse(file.reference_json);
  return root.dump(2) + "\n";
}

std::string defaults_json() { return scenario_to_json(ScenarioFile{}); }

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_measurement_csv(std::ostream& os, const Measurements& m) {
  os << "k,sensor,re,im\n";
  const auto sensors = static_cast<std::size_t>(m.num_sensors);
  for (std::size_t k = 0; k < m.stacked.size(); ++k) {
    const auto& y = m.stacked[k];
    for (std::size_t s = 0; s < sensors; ++s) {
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", k, s, y[s], y[s + sensors]);
      os << buf;
    }
  }
}

Measurements read_measurement_csv(std::istream& is, const std::string& name) {
  auto fail = [&](std::size_t line, std::size_t col, const std::string& what) -> void {
    throw std::runtime_error(name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                             ": " + what);
  };

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) fail(1, 1, "empty measurement file");
  ++lineno;
  if (line == "k,sensor,re,im\r") line.pop_back();
  if (line != "k,sensor,re,im") fail(lineno, 1, "expected header \"k,sensor,re,im\"");

  struct Row {
    long k;
    long sensor;
    double re;
    double im;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 4> fields;
    std::size_t field = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field >= 4) fail(lineno, i + 1, "too many fields");
        fields[field++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (field != 4) fail(lineno, line.size() + 1, "expected 4 fields");
    Row row{};
    try {
      std::size_t pos = 0;
      row.k = std::stol(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      fail(lineno, 1, "bad snapshot index \"" + fields[0] + "\"");
    }
    try {
      std::size_t pos = 0;
      row.sensor = std::stol(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      fail(lineno, 2, "bad sensor index \"" + fields[1] + "\"");
    }
    for (int f = 2; f < 4; ++f) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(fields[static_cast<std::size_t>(f)], &pos);
        if (pos != fields[static_cast<std::size_t>(f)].size() || !std::isfinite(v)) {
          throw std::invalid_argument("not a finite number");
        }
        (f == 2 ? row.re : row.im) = v;
      } catch (const std::exception&) {
        fail(lineno, static_cast<std::size_t>(f) + 1,
             "bad value \"" + fields[static_cast<std::size_t>(f)] + "\"");
      }
    }
    if (row.k < 0 || row.sensor < 0) fail(lineno, 1, "negative index");
    rows.push_back(row);
  }
  if (rows.empty()) fail(lineno, 1, "no measurement rows");

  long sensors = 0;
  long snapshots = 0;
  for (const Row& r : rows) {
    sensors = std::max(sensors, r.sensor + 1);
    snapshots = std::max(snapshots, r.k + 1);
  }
  Measurements m;
  m.num_sensors = static_cast<int>(sensors);
  m.stacked.assign(static_cast<std::size_t>(snapshots),
                   std::vector<double>(2 * static_cast<std::size_t>(sensors), 0.0));
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(snapshots),
                                      std::vector<bool>(static_cast<std::size_t>(sensors), false));
  for (const Row& r : rows) {
    auto& y = m.stacked[static_cast<std::size_t>(r.k)];
    y[static_cast<std::size_t>(r.sensor)] = r.re;
    y[static_cast<std::size_t>(r.sensor) + static_cast<std::size_t>(sensors)] = r.im;
    seen[static_cast<std::size_t>(r.k)][static_cast<std::size_t>(r.sensor)] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    for (std::size_t s = 0; s < seen[k].size(); ++s) {
      if (!seen[k][s]) {
        throw std::runtime_error(name + ": missing row for snapshot " + std::to_string(k) +
                                 ", sensor " + std::to_string(s));
      }
    }
  }
  return m;
}

void write_records_csv(std::ostream& os, const std::vector<SnapshotRecord>& records) {
  os << "trial,k,true_doa_deg,est_doa_deg,num_kept,iters,solver_ms\n";
  for (const SnapshotRecord& r : records) {
    os << r.trial << ',' << r.k << ',' << format_double(r.true_doa_deg) << ',';
    if (r.est_doa_deg) os << format_double(*r.est_doa_deg);
    os << ',' << r.num_kept << ',' << r.solver_iterations << ',';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", r.solver_seconds * 1e3);
    os << buf << '\n';
  }
}

void write_rmse_series_csv(std::ostream& os, int num_snapshots,
                           const std::vector<double>* baseline,
                           const std::vector<double>* modified) {
  os << "k,rmse_baseline,rmse_modified\n";
  for (int k = 0; k < num_snapshots; ++k) {
    os << k << ',';
    if (baseline) os << format_double((*baseline)[static_cast<std::size_t>(k)]);
    os << ',';
    if (modified) os << format_double((*modified)[static_cast<std::size_t>(k)]);
    os << '\n';
  }
}

int effective_threads(const CommonOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("DOA_BCSKF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

namespace {

ScenarioFile resolve_config(const CommonOptions& opts) {
  ScenarioFile file;
  if (opts.config_path) file = load_scenario_file(*opts.config_path);
  if (opts.seed) file.spec.base_seed = *opts.seed;
  if (opts.trials) file.spec.num_trials = *opts.trials;
  if (opts.snapshots) file.spec.num_snapshots = *opts.snapshots;
  if (opts.eta) file.spec.solver.eta = *opts.eta;
  if (opts.method) {
    if (*opts.method == "baseline") {
      file.mode = MethodMode::baseline;
      file.spec.method = Method::baseline_rvm;
    } else if (*opts.method == "modified") {
      file.mode = MethodMode::modified;
      file.spec.method = Method::modified_rvm_bcskf;
    } else if (*opts.method == "both") {
      file.mode = MethodMode::both;
    } else {
      throw std::runtime_error("--method must be baseline, modified or both");
    }
  }
  file.spec.validate();
  return file;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

json run_result_summary(const RunResult& r) {
  return json{{"method", method_name(r.method)},
              {"mean_rmse_deg", r.mean_rmse_deg},
              {"mean_time_s", r.mean_solver_seconds},
              {"rmse_per_snapshot_deg", r.rmse_per_snapshot},
              {"seed", r.base_seed}};
}

Dictionary dictionary_for(const ScenarioSpec& spec) {
  return Dictionary(
      ArrayGeometry::uniform(spec.geometry.num_sensors, spec.geometry.spacing_wavelengths),
      AngularGrid::uniform(spec.grid_spacing_deg));
}

json estimate_to_json(const RvmResult& res) {
  return json{{"doas_deg", res.estimate.doas_deg},
              {"num_kept", res.estimate.kept_indices.size()},
              {"sigma2_opt", res.estimate.sigma2_opt},
              {"log_evidence", res.estimate.log_evidence},
              {"iterations", res.state.iterations},
              {"converged", res.state.converged}};
}

}  // namespace

int run_synth(const CommonOptions& opts) {
  const ScenarioFile file = resolve_config(opts);
  const Dictionary dict = dictionary_for(file.spec);
  const TrialData data = make_trial_data(file.spec, dict, file.spec.base_seed);

  Measurements m;
  m.num_sensors = file.spec.geometry.num_sensors;
  m.stacked = data.measurements;

  if (opts.out) {
    auto os = open_output(*opts.out);
    write_measurement_csv(os, m);
  } else {
    write_measurement_csv(std::cout, m);
  }
  return kExitOk;
}

int run_estimate(const CommonOptions& opts, const std::optional<std::string>& input) {
  const ScenarioFile file = resolve_config(opts);

  std::vector<double> y;
  GeometryParams geometry = file.spec.geometry;
  if (input) {
    std::ifstream is(*input);
    if (!is) throw std::runtime_error("cannot open measurement file: " + *input);
    const Measurements m = read_measurement_csv(is, *input);
    if (m.stacked.size() != 1) {
      throw std::runtime_error(*input + ": estimate expects exactly one snapshot, found " +
                               std::to_string(m.stacked.size()));
    }
    if (opts.config_path && m.num_sensors != geometry.num_sensors) {
      throw std::runtime_error(*input + ": sensor count " + std::to_string(m.num_sensors) +
                               " does not match configured geometry");
    }
    geometry.num_sensors = m.num_sensors;
    y = m.stacked.front();
  }

  ScenarioSpec spec = file.spec;
  spec.geometry = geometry;
  const Dictionary dict = dictionary_for(spec);
  if (!input) {
    spec.num_snapshots = 1;
    const TrialData data = make_trial_data(spec, dict, spec.base_seed);
    y = data.measurements.front();
  }

  SparseProblem problem(dict, std::move(y), std::vector<double>(dict.coef_dim(), 0.0));
  const RvmResult res = run_modified_rvm(problem, spec.solver);
  const std::string text = estimate_to_json(res).dump(2) + "\n";
  if (opts.out) {
    auto os = open_output(*opts.out);
    os << text;
  } else {
    std::cout << text;
  }
  return kExitOk;
}

int run_track(const CommonOptions& opts, const std::optional<std::string>& input,
              std::optional<double> rate_override) {
  if (!input) throw std::runtime_error("track requires --input <measurements.csv>");
  const ScenarioFile file = resolve_config(opts);

  std::ifstream is(*input);
  if (!is) throw std::runtime_error("cannot open measurement file: " + *input);
  const Measurements m = read_measurement_csv(is, *input);
  if (opts.config_path && m.num_sensors != file.spec.geometry.num_sensors) {
    throw std::runtime_error(*input + ": sensor count " + std::to_string(m.num_sensors) +
                             " does not match configured geometry");
  }

  ScenarioSpec spec = file.spec;
  spec.geometry.num_sensors = m.num_sensors;
  if (rate_override) spec.doa_rate_deg = *rate_override;
  const Dictionary dict = dictionary_for(spec);

  TrackerConfig tracker;
  tracker.shift.delta_indices = spec.shift_delta();
  tracker.solver = spec.solver;
  tracker.warm_start_noise_var = spec.warm_start_noise_var;

  std::ostringstream out;
  out << "k,est_doa_deg,num_kept,iters,solver_ms\n";
  TrackState state;
  for (std::size_t k = 0; k < m.stacked.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrackStepResult step = (k == 0)
                                     ? init_track(dict, m.stacked[k], tracker)
                                     : track_snapshot(state, dict, m.stacked[k], tracker);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    state = step.state;

    std::optional<double> doa;
    double best_energy = -1.0;
    for (const std::size_t i : step.estimate.kept_indices) {
      const double e = std::norm(step.estimate.x_opt[i]);
      if (e > best_energy) {
        best_energy = e;
        doa = dict.grid.angle(i);
      }
    }
    out << k << ',';
    if (doa) out << format_double(*doa);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", seconds * 1e3);
    out << ',' << step.estimate.kept_indices.size() << ',' << step.solver_iterations << ','
        << buf << '\n';
  }

  if (opts.out) {
    auto os = open_output(*opts.out);
    os << out.str();
  } else {
    std::cout << out.str();
  }
  return kExitOk;
}

int run_bench(const CommonOptions& opts) {
  ScenarioFile file = resolve_config(opts);
  if (opts.out) file.output_dir = *opts.out;
  const int threads = effective_threads(opts);

  const fs::path out_dir(file.output_dir);
  fs::create_directories(out_dir);

  json summary;
  summary["artifact_version"] = kArtifactVersion;
  summary["seed"] = file.spec.base_seed;
  summary["config"] = json::parse(scenario_to_json(file));
  if (!file.reference_json.empty()) summary["reference"] = json::parse(file.reference_json);

  std::optional<RunResult> baseline;
  std::optional<RunResult> modified;
  if (file.mode == MethodMode::both) {
    const MethodComparison cmp = compare_methods(file.spec, threads);
    baseline = cmp.baseline;
    modified = cmp.modified;
    summary["method"] = "both";
    summary["baseline"] = run_result_summary(*baseline);
    summary["modified"] = run_result_summary(*modified);
  } else {
    ScenarioSpec spec = file.spec;
    spec.method = file.mode == MethodMode::baseline ? Method::baseline_rvm
                                                    : Method::modified_rvm_bcskf;
    const RunResult res = run_monte_carlo(spec, threads);
    summary["method"] = method_name(res.method);
    summary["mean_rmse_deg"] = res.mean_rmse_deg;
    summary["mean_time_s"] = res.mean_solver_seconds;
    summary["rmse_per_snapshot_deg"] = res.rmse_per_snapshot;
    if (file.mode == MethodMode::baseline) {
      baseline = res;
    } else {
      modified = res;
    }
  }

  // records.csv carries the tracking method when both run; the per-snapshot
  // estimator's rows then live in records_baseline.csv with the same schema.
  {
    const RunResult& primary = modified ? *modified : *baseline;
    auto os = open_output(out_dir / "records.csv");
    write_records_csv(os, primary.records);
  }
  if (baseline && modified) {
    auto os = open_output(out_dir / "records_baseline.csv");
    write_records_csv(os, baseline->records);
  }
  {
    auto os = open_output(out_dir / "rmse_series.csv");
    write_rmse_series_csv(os, file.spec.num_snapshots,
                          baseline ? &baseline->rmse_per_snapshot : nullptr,
                          modified ? &modified->rmse_per_snapshot : nullptr);
  }
  {
    auto os = open_output(out_dir / "summary.json");
    os << summary.dump(2) << "\n";
  }

  if (opts.check) {
    if (!baseline || !modified) {
      throw std::runtime_error("--check requires method \"both\"");
    }
    if (!(modified->mean_rmse_deg < baseline->mean_rmse_deg)) {
      std::cerr << "check failed: modified mean RMSE " << modified->mean_rmse_deg
                << " is not below baseline " << baseline->mean_rmse_deg << "\n";
      return kExitCheckFailed;
    }
  }
  return kExitOk;
}

}  // namespace doabcs::cli
