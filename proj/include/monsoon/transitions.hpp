#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "monsoon/grid.hpp"
#include "monsoon/matrix.hpp"

namespace monsoon {

struct TransitionModel {
  std::vector<int> labels;       // K pattern labels
  Matrix<double> matrix;         // K x K, row-stochastic
  Matrix<long> counts;           // K x K
  std::vector<bool> empty_rows;  // rows without counts, set to uniform
  bool include_cross_season = false;

  std::size_t size() const { return labels.size(); }
  /// Index of `label` in labels, or -1.
  int index_of(int label) const;
};

/// Maximum-likelihood transition estimate over consecutive day pairs. Days
/// whose label is not in `labels` are a sink: pairs touching them are not
/// counted.
TransitionModel estimate_transitions(std::span<const int> u,
                                     const CalendarIndex& calendar,
                                     const std::vector<int>& labels,
                                     bool include_cross_season = false);

/// Self-transitions zeroed, rows left unnormalised.
Matrix<double> zero_diagonal(const Matrix<double>& m);

/// Label order grouping labels by family (stable within a family).
std::vector<std::size_t> family_order(const std::vector<int>& labels,
                                      const std::map<int, int>& family_of);

/// out(i, j) = m(perm[i], perm[j]).
Matrix<double> permute(const Matrix<double>& m, const std::vector<std::size_t>& perm);
std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm);

/// Merges consecutive duplicates.
std::vector<int> collapse_runs(std::span<const int> seq);

struct SubsequenceCount {
  std::vector<int> window;
  long count = 0;
};

/// Runs are collapsed per season, then every length-k sliding window is
/// counted. Sorted by count descending, ties lexicographically ascending.
/// top_n <= 0 keeps everything. Labels < 0 are treated as a sink that splits
/// a season into separate segments.
std::vector<SubsequenceCount> frequent_ksubseq(std::span<const int> u,
                                               const CalendarIndex& calendar,
                                               int k = 3, int top_n = 0);

struct PatternSpellStats {
  /// Keyed by label; labels without occurrences are absent.
  std::map<int, double> mean_length;
  std::map<int, double> spells_per_season;
  std::map<int, long> spell_count;
  std::map<int, long> days;
};

/// A spell is a maximal within-season run of one label.
PatternSpellStats pattern_spell_stats(std::span<const int> u,
                                      const CalendarIndex& calendar,
                                      const std::vector<int>& labels);

/// Power iteration on the row-stochastic matrix.
std::vector<double> stationary_distribution(const Matrix<double>& m,
                                            int max_iter = 100000,
                                            double tol = 1e-15);

struct SimulatedSeason {
  std::vector<int> labels;  // pattern labels
  Matrix<double> rain;      // S x length, column t = crp of labels[t]
};

/// Markov-chain simulation. `crp` rows are indexed like model.labels.
SimulatedSeason simulate_season(const TransitionModel& model,
                                const Matrix<double>& crp,
                                std::span<const double> initial, int length,
                                std::uint64_t seed);

void write_transition_csv(const std::filesystem::path& path,
                          const std::vector<int>& labels, const Matrix<double>& m,
                          const std::string& stamp);
void write_transition_counts_csv(const std::filesystem::path& path,
                                 const TransitionModel& model,
                                 const std::string& stamp);
/// Reads a matrix written by write_transition_csv; rows must sum to 1 within
/// `tol`.
TransitionModel read_transition_csv(const std::filesystem::path& path,
                                    double tol = 1e-9);

}  // namespace monsoon
