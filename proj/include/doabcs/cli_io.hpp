#pragma once

// Scenario configuration files (JSON, strict), measurement/result
// persistence (CSV), and the implementations behind the CLI subcommands.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "doabcs/scenarios.hpp"

namespace doabcs::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

enum class MethodMode { baseline, modified, both };

struct ScenarioFile {
  ScenarioSpec spec;
  MethodMode mode = MethodMode::both;
  std::string output_dir = "out";
  std::string reference_json;  // optional free-form object, echoed to summaries
};

// Strict parser: unknown keys anywhere are an error. Throws
// std::runtime_error with a path-qualified message.
ScenarioFile parse_scenario_json(const std::string& text);
ScenarioFile load_scenario_file(const std::string& path);

// Fully resolved defaults as a JSON document (what --print-defaults shows).
std::string defaults_json();
// The given configuration rendered back to JSON (the summary's config echo).
std::string scenario_to_json(const ScenarioFile& file);

struct Measurements {
  int num_sensors = 0;
  std::vector<std::vector<double>> stacked;  // per snapshot, length 2M
};

void write_measurement_csv(std::ostream& os, const Measurements& m);
// Throws std::runtime_error with file:line:column diagnostics.
Measurements read_measurement_csv(std::istream& is, const std::string& name);

void write_records_csv(std::ostream& os, const std::vector<SnapshotRecord>& records);
void write_rmse_series_csv(std::ostream& os, int num_snapshots,
                           const std::vector<double>* baseline,
                           const std::vector<double>* modified);

struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> snapshots;
  std::optional<std::string> method;  // baseline | modified | both
  std::optional<double> eta;
  std::optional<std::string> out;
  bool check = false;
  int threads = 0;  // 0: --threads absent; falls back to DOA_BCSKF_THREADS
};

int run_synth(const CommonOptions& opts);
int run_estimate(const CommonOptions& opts, const std::optional<std::string>& input);
int run_track(const CommonOptions& opts, const std::optional<std::string>& input,
              std::optional<double> rate_override);
int run_bench(const CommonOptions& opts);

int effective_threads(const CommonOptions& opts);

}  // namespace doabcs::cli
