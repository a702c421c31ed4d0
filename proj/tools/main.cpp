#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "doabcs/cli_io.hpp"

namespace {

void add_common(CLI::App* cmd, doabcs::cli::CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Scenario configuration file (JSON)");
  cmd->add_option("--seed", opts.seed, "Override the base seed");
  cmd->add_option("--trials", opts.trials, "Override the number of Monte Carlo trials");
  cmd->add_option("--snapshots", opts.snapshots, "Override the number of snapshots");
  cmd->add_option("--method", opts.method, "baseline | modified | both");
  cmd->add_option("--eta", opts.eta, "Override the energy-retention threshold");
  cmd->add_option("--threads", opts.threads,
                  "Worker threads (default: DOA_BCSKF_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direction-of-arrival estimation and tracking on a uniform linear array"};
  app.require_subcommand(0, 1);

  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults,
               "Print the fully resolved default configuration and exit");

  doabcs::cli::CommonOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Synthesize a measurement file for one trial");
  add_common(synth, synth_opts);
  synth->add_option("--out", synth_opts.out, "Output CSV path (default: stdout)");

  doabcs::cli::CommonOptions est_opts;
  std::optional<std::string> est_input;
  auto* estimate = app.add_subcommand("estimate", "Single-snapshot bearing estimate");
  add_common(estimate, est_opts);
  estimate->add_option("--input", est_input, "Measurement CSV with one snapshot");
  estimate->add_option("--out", est_opts.out, "Output JSON path (default: stdout)");

  doabcs::cli::CommonOptions track_opts;
  std::optional<std::string> track_input;
  std::optional<double> track_rate;
  auto* track = app.add_subcommand("track", "Track a measurement sequence");
  add_common(track, track_opts);
  track->add_option("--input", track_input, "Measurement CSV (one or more snapshots)");
  track->add_option("--rate", track_rate, "Expected bearing change, degrees per snapshot");
  track->add_option("--out", track_opts.out, "Output CSV path (default: stdout)");

  doabcs::cli::CommonOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Run a Monte Carlo benchmark scenario");
  add_common(bench, bench_opts);
  bench->add_option("--out", bench_opts.out, "Output directory (overrides output_dir)");
  bench->add_flag("--check", bench_opts.check,
                  "Exit 2 unless the tracker beats the per-snapshot baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : doabcs::cli::kExitUsage;
  }

  try {
    if (print_defaults) {
      std::cout << doabcs::cli::defaults_json();
      return doabcs::cli::kExitOk;
    }
    if (synth->parsed()) return doabcs::cli::run_synth(synth_opts);
    if (estimate->parsed()) return doabcs::cli::run_estimate(est_opts, est_input);
    if (track->parsed()) return doabcs::cli::run_track(track_opts, track_input, track_rate);
    if (bench->parsed()) return doabcs::cli::run_bench(bench_opts);
    std::cout << app.help();
    return doabcs::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return doabcs::cli::kExitUsage;
  }
}
