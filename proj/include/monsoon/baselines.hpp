#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monsoon/grid.hpp"
#include "monsoon/kernels.hpp"
#include "monsoon/matrix.hpp"

namespace monsoon {

enum class ClusterMethod { kmeans, spect_euclid, spect_hamming, mrf };

const char* to_string(ClusterMethod m);

struct ClusteringResult {
  std::vector<int> labels;
  int k = 0;
  double objective = 0.0;
  ClusterMethod method = ClusterMethod::kmeans;
  /// K-means only: objective after every Lloyd iteration.
  std::vector<double> objective_trace;
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or max_iter is reached. Clusters that empty out are reseeded at
/// the point farthest from its centroid. Rows of `vectors` are the items.
ClusteringResult kmeans(const Matrix<double>& vectors, int k, std::uint64_t seed,
                        int max_iter = 300, int workers = 1);

struct Affinity {
  kernels::Metric metric = kernels::Metric::euclidean;
  /// Gaussian bandwidth; <= 0 selects the median pairwise distance.
  double bandwidth = 0.0;
};

/// Normalised spectral clustering (Ng-Jordan-Weiss) of the rows of `items`.
ClusteringResult spectral(const Matrix<double>& items, int k,
                          const Affinity& affinity, std::uint64_t seed,
                          int workers = 1);

/// Same, from a precomputed symmetric non-negative affinity matrix.
ClusteringResult spectral_from_affinity(const Matrix<double>& affinity, int k,
                                        std::uint64_t seed);

/// Location series x(s, .) as items. The Hamming variant binarises each series
/// against its own mean first.
ClusteringResult spectral_locations(const RainfallField& field, int k,
                                    const Affinity& affinity, std::uint64_t seed,
                                    int workers = 1);
/// Day vectors x(., t) as items; the Hamming variant uses the local-mean
/// binarisation of every location.
ClusteringResult spectral_days(const RainfallField& field, int k,
                               const Affinity& affinity, std::uint64_t seed,
                               int workers = 1);

struct EvalReport {
  double std_yy = 0.0;
  double l2_theta = 0.0;
  double hamm_theta_d = 0.0;
  /// Day clusterings only.
  std::optional<long> self_transitions;
};

/// Labels over locations. Canonical series are recomputed from the labels.
EvalReport evaluate_temporal_clustering(const RainfallField& field,
                                        const std::vector<int>& labels,
                                        const BinaryMatrix& z);

/// Labels over days.
EvalReport evaluate_daily_clustering(const RainfallField& field,
                                     const std::vector<int>& labels,
                                     const BinaryMatrix& z);

struct SimilaritySeries {
  std::vector<double> per_day;
  std::vector<int> years;
  std::vector<double> per_year_mean;
  double overall_mean = 0.0;
  /// Pearson correlation of per-day similarity with Y(t); NaN if either is
  /// constant.
  double correlation_with_aggregate = 0.0;
};

/// Per-day Hamming similarity between Z(., t) and the CDP of u(t).
/// `cdp` is indexed by label: cdp(label, s).
SimilaritySeries hamming_similarity_series(const RainfallField& field,
                                           const BinaryMatrix& z,
                                           const std::vector<int>& labels,
                                           const BinaryMatrix& cdp);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace monsoon
