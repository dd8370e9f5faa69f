#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "monsoon/grid.hpp"
#include "monsoon/matrix.hpp"

namespace monsoon {

enum class SpellKind { active, brk, wet, dry };
enum class SpellScale { all_india, region, grid };

const char* to_string(SpellKind k);
const char* to_string(SpellScale s);

struct Run {
  int start = 0;  // first day index
  int end = 0;    // last day index, inclusive
  int length() const { return end - start + 1; }
  bool operator==(const Run&) const = default;
};

struct SpellSet {
  SpellKind kind = SpellKind::active;
  SpellScale scale = SpellScale::all_india;
  int scale_id = 0;           // region label or location id
  std::vector<int> days;      // sorted day indices
  std::vector<Run> spells;    // maximal within-season runs, length >= min_run

  bool contains(int day) const;
};

/// Maximal within-season runs of `mask` with length >= min_run.
std::vector<Run> find_runs(std::span<const unsigned char> mask,
                           const CalendarIndex& calendar, int min_run);

struct AggregateThresholds {
  double mean = 0.0;
  double sd = 0.0;  // population
  /// True when sd is zero up to rounding; no day is then active or break.
  bool degenerate = false;
};

AggregateThresholds aggregate_thresholds(std::span<const double> y);

struct ActiveBreak {
  SpellSet active;
  SpellSet brk;
  AggregateThresholds thresholds;
};

/// Active: Y(t) >= mu + sigma. Break: Y(t) < mu - sigma.
ActiveBreak act_brk_threshold(std::span<const double> y,
                              const CalendarIndex& calendar, int min_run = 3);

struct ClusterClasses {
  std::vector<int> active;  // labels with mu_k >= mu_Y + sigma_Y
  std::vector<int> brk;     // labels with mu_k <= mu_Y - sigma_Y
};

ClusterClasses classify_clusters(const std::map<int, double>& mu_k,
                                 const AggregateThresholds& th);

/// Days are active/break when their cluster is an active/break cluster.
/// `mu_k` holds the prominent clusters.
ActiveBreak act_brk_cluster(std::span<const int> u, const std::map<int, double>& mu_k,
                            std::span<const double> y, const CalendarIndex& calendar,
                            int min_run = 3);

struct SetStats {
  std::size_t size = 0;
  double mean_rain_per_grid = 0.0;  // mean of Y(t)/S over the set, mm/day/grid
  double mean_above_mean_locations = 0.0;
  std::size_t spell_count = 0;
  double mean_spell_length = 0.0;
};

struct SpellComparison {
  SetStats a;
  SetStats b;
  std::size_t intersection = 0;
};

SpellComparison compare_spells(const SpellSet& a, const SpellSet& b,
                               const RainfallField& field);

struct LocalSpells {
  std::vector<SpellSet> wet;  // one per location
  std::vector<SpellSet> dry;
  std::vector<double> mean_wet_length;  // 0 when a location has no wet spell
  std::vector<double> mean_dry_length;
};

LocalSpells local_spells(const BinaryMatrix& z, const CalendarIndex& calendar,
                         int min_run = 1);

struct RegionalSpells {
  int region = 0;
  SpellSet wet;
  SpellSet dry;
};

/// `cds` maps region label -> D-vector.
std::vector<RegionalSpells> regional_spells(
    const std::map<int, std::vector<unsigned char>>& cds,
    const CalendarIndex& calendar, int min_run = 1);

/// Fractions are NaN when there are no neighbour pairs / no consecutive days.
struct Coherence {
  double neighbor_agreement = 0.0;
  double day_persistence = 0.0;
};

Coherence coherence_stats(const BinaryMatrix& z, const GridGeometry& geometry,
                          const CalendarIndex& calendar);

struct ThresholdMode {
  bool local_mean = true;
  double fixed_mm = 0.0;

  static ThresholdMode local() { return {true, 0.0}; }
  static ThresholdMode fixed(double mm) { return {false, mm}; }
};

/// local: z = 1[x(s,t) > mean_t x(s,.)]; fixed(c): z = 1[x(s,t) > c].
BinaryMatrix threshold_discretize(const RainfallField& field, ThresholdMode mode);

/// Rows `scale,id,kind,start_date,end_date,length`.
void write_spell_rows(std::ostream& out, const SpellSet& set,
                      const CalendarIndex& calendar);

}  // namespace monsoon
