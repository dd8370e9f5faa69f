#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "monsoon/csv.hpp"
#include "monsoon/gibbs.hpp"
#include "monsoon/mrf_model.hpp"
#include "monsoon/patterns.hpp"
#include "monsoon/synth.hpp"

namespace monsoon::app {

/// Everything one run needs, read from a flat `key = value` file. Relative
/// paths are resolved against the config file's directory.
struct RunConfig {
  csv::KeyValues raw;

  std::filesystem::path data;
  std::filesystem::path geometry;
  std::filesystem::path masks;
  std::filesystem::path out_dir = ".";
  std::filesystem::path fit_dir;  // defaults to out_dir

  ModelParams model;
  SamplerConfig sampler;

  int min_run = 3;
  int local_min_run = 1;
  bool include_cross_season = false;
  ProminenceRule prominence = ProminenceRule::five_of_eight;
  int min_years = 0;  // 0: derived from `prominence`
  double dry_quantile = 0.3;
  std::map<int, int> family_overrides;
  int subseq_k = 3;
  int subseq_top_n = 20;
  int baseline_k_days = 0;       // 0: realised MRF cluster count
  int baseline_k_locations = 0;  // 0: realised MRF cluster count
  double fixed_threshold_mm = 5.0;

  int synth_rows = 8;
  int synth_cols = 8;
  int synth_years = 2;
  int synth_first_year = 2000;
  int synth_patterns = 4;
  double synth_flip_noise = 0.1;
  double synth_in_prob = 0.9;
  double synth_out_prob = 0.05;
  double synth_self_prob = 0.8;
  SynthEmission synth_emission;

  int sim_seasons = 10;
  int sim_length = CalendarIndex::kSeasonLength;
  std::filesystem::path sim_transitions;  // defaults to fit_dir/transitions.csv
  std::filesystem::path sim_patterns;     // defaults to fit_dir/patterns_spatial.csv
  bool sim_stationary_start = false;

  /// Provenance line written at the top of every output. Execution-only keys
  /// (out, fit_dir, workers) are left out so outputs do not depend on them.
  std::string stamp(const std::string& command) const;
  SynthSpec synth_spec() const;
};

/// `overrides` win over values from the file. An empty path means defaults.
RunConfig load_run_config(const std::filesystem::path& path,
                          const csv::KeyValues& overrides = {});
RunConfig run_config_from(const csv::KeyValues& kv,
                          const std::filesystem::path& base_dir);

int cmd_synth(const RunConfig& cfg);
int cmd_fit(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg);
int cmd_simulate(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);

/// Reads the MAP state written by cmd_fit.
LatentState read_state(const std::filesystem::path& fit_dir, const RainfallField& field);

}  // namespace monsoon::app
