#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "monsoon/mrf_model.hpp"

namespace monsoon {

enum class InitMode { threshold_local_mean, random, given };

struct SamplerConfig {
  int n_sweeps = 500;
  int burn_in = 100;
  std::uint64_t seed = 1;
  InitMode init = InitMode::threshold_local_mean;
  /// Required when init == given.
  std::optional<LatentState> given;
  /// When false the MAP state is not tracked and equals the final state.
  bool track_map = true;
  int worker_count = 1;

  void validate() const;
};

struct SweepStats {
  double log_density = 0.0;
  long changed_z = 0;
  long changed_u = 0;
  long changed_v = 0;
};

struct SamplerResult {
  LatentState map_state;
  ClusterPrototypes map_prototypes;
  double map_log_density = 0.0;
  LatentState final_state;
  ClusterPrototypes final_prototypes;
  std::vector<SweepStats> sweeps;
  /// Best log density among MAP candidates up to each sweep; -inf during
  /// burn-in.
  std::vector<double> map_trace;

  std::vector<double> log_density_trace() const;
};

/// z(s,t) = 1[x(s,t) > mean_t x(s,.)].
BinaryMatrix local_mean_threshold(const RainfallField& field);

/// Initial state and matching prototypes. Deterministic given the seed.
std::pair<LatentState, ClusterPrototypes> initialize(const RainfallField& field,
                                                     const ModelParams& params,
                                                     const SamplerConfig& config);

/// Gibbs sampler: per sweep, two checkerboard half-sweeps over Z, then every
/// U(t), then every V(s), then a prototype refresh. `params` must already be
/// resolved (see resolve_params).
SamplerResult run(const RainfallField& field, const ModelParams& params,
                  const SamplerConfig& config);

/// Consecutive-day pairs with equal labels. With include_cross_season the
/// D-1 pairs of the concatenated series are scanned.
long self_transition_count(std::span<const int> u, const CalendarIndex& calendar,
                           bool include_cross_season = true);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const SamplerResult& result, const std::string& stamp);

}  // namespace monsoon
