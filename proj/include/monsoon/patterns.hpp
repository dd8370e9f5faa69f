#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "monsoon/grid.hpp"
#include "monsoon/mrf_model.hpp"

namespace monsoon {

/// Canonical patterns of one daily cluster.
struct SpatialPattern {
  int label = 0;
  std::vector<double> crp;         // mean rainfall per location, mm/day
  std::vector<unsigned char> cdp;  // majority wet/dry per location
  std::vector<int> days;
  double mu_k = 0.0;               // mean Y(t) over the cluster's days
  double wet_fraction = 0.0;       // mean of cdp
  bool prominent = false;
  int family = 0;                  // 1..3 once assigned, 0 otherwise

  double aggregate() const;        // sum_s crp
};

struct CanonicalPatternSet {
  /// Non-empty clusters in increasing label order.
  std::vector<SpatialPattern> patterns;
  /// Indices into `patterns`, stable-sorted by ascending aggregate crp.
  std::vector<std::size_t> order;
  /// Labels in 0..n_labels-1 with no days; reported instead of extracted.
  std::vector<int> empty_labels;

  const SpatialPattern* find(int label) const;
  /// Rank of each pattern in `order` (0 = driest), indexed like `patterns`.
  std::vector<std::size_t> ranks() const;
};

struct TemporalPattern {
  int label = 0;
  std::vector<double> cts;
  std::vector<unsigned char> cds;
  std::vector<int> locations;
};

struct TemporalPatternSet {
  std::vector<TemporalPattern> patterns;
  std::vector<int> empty_labels;

  const TemporalPattern* find(int label) const;
};

/// Mean of x and majority of z (ties -> wet) over each cluster's days.
CanonicalPatternSet extract_spatial(const RainfallField& field,
                                    const LatentState& state, int n_labels);

/// Mirror of extract_spatial over each cluster's locations.
TemporalPatternSet extract_temporal(const RainfallField& field,
                                    const LatentState& state, int n_labels);

enum class ProminenceRule {
  five_of_eight,  // ceil(5 * n_years / 8)
  four_of_eight,  // ceil(4 * n_years / 8)
};

int default_min_years(int n_years, ProminenceRule rule = ProminenceRule::five_of_eight);

/// A pattern is prominent when its days fall in at least min_years distinct
/// seasons.
void mark_prominent(CanonicalPatternSet& set, const CalendarIndex& calendar,
                    int min_years);

struct FamilyRule {
  std::vector<unsigned char> monsoon_zone;  // S-vector
  std::vector<unsigned char> north;         // S-vector
  /// Prominent patterns with wet_fraction strictly below this quantile
  /// (linear interpolation) of prominent wet fractions form family 1.
  double dry_quantile = 0.3;
  std::map<int, int> overrides;  // label -> family
};

/// Tags every prominent pattern with family 1, 2 or 3. Non-prominent patterns
/// keep family 0.
void assign_families(CanonicalPatternSet& set, const FamilyRule& rule);

/// Mean days per season in June, July, August, September, per pattern (same
/// indexing as set.patterns).
std::vector<std::array<double, 4>> monthly_distribution(const CanonicalPatternSet& set,
                                                        const CalendarIndex& calendar);

double hamming_similarity(std::span<const unsigned char> a,
                          std::span<const unsigned char> b);

struct DayMatch {
  int crp_label = -1;
  int cdp_label = -1;
  double hamming_similarity = 0.0;
};

/// Nearest crp by L2 and nearest cdp by Hamming; ties go to the lower label.
DayMatch match_day(std::span<const double> x_col,
                   std::span<const unsigned char> z_col,
                   const CanonicalPatternSet& set);

/// cdp rows indexed by label (0..n_labels-1); empty labels are all-dry.
BinaryMatrix cdp_matrix(const CanonicalPatternSet& set, int n_labels,
                        std::size_t n_locations);

}  // namespace monsoon
