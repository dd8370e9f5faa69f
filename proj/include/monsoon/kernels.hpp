#pragma once

#include <cstdint>
#include <vector>

#include "monsoon/matrix.hpp"
#include "monsoon/mrf_model.hpp"

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference used in tests, `omp` is the OpenMP version. Both produce
// bit-identical results: each output element is computed by the same
// arithmetic in the same order, and random draws are keyed by site.
namespace monsoon::kernels {

/// RNG stream ids for counter_uniform.
enum Stream : std::uint64_t { kStreamZ = 1, kStreamU = 2, kStreamV = 3, kStreamInit = 4 };

struct SweepKey {
  std::uint64_t seed = 0;
  std::uint64_t sweep = 0;
};

/// Sites (s, t) with (parity(s) + t) % 2 == color. No two sites of one color
/// share a spatial or temporal edge.
inline int site_color(const GridGeometry& g, std::size_t s, std::size_t t) {
  return (g.parity(s) + static_cast<int>(t & 1)) & 1;
}

enum class Metric { euclidean, hamming };

namespace serial {

/// Resamples every Z site of one color. Returns the number of changed sites.
long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key);

/// out(t, k) = u_log_likelihood(t, k, ...).
void u_log_likelihood_table(const LatentState& state,
                            const std::vector<double>& y,
                            const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out);

/// out(s, k) = v_log_likelihood(s, k, ...).
void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out);

/// Squared distances between the rows of `items` (Hamming: mismatch count,
/// which is its own square).
void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out);

/// Index of the nearest centroid (lowest index on ties) and its squared
/// distance, per row of `points`.
void nearest_centroid(const Matrix<double>& points,
                      const Matrix<double>& centroids, std::vector<int>& labels,
                      std::vector<double>& sq_dist);

}  // namespace serial

namespace omp {

long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key, int workers);

void u_log_likelihood_table(const LatentState& state,
                            const std::vector<double>& y,
                            const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers);

void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers);

void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out, int workers);

void nearest_centroid(const Matrix<double>& points,
                      const Matrix<double>& centroids, std::vector<int>& labels,
                      std::vector<double>& sq_dist, int workers);

}  // namespace omp

/// Dispatches to serial when workers <= 1.
long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key, int workers);
void u_log_likelihood_table(const LatentState& state, const std::vector<double>& y,
                            const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers);
void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers);
void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out, int workers);
void nearest_centroid(const Matrix<double>& points, const Matrix<double>& centroids,
                      std::vector<int>& labels, std::vector<double>& sq_dist,
                      int workers);

/// Per-row squared distance shared by both variants.
inline double sq_distance(std::span<const double> a, std::span<const double> b,
                          Metric metric) {
  double d = 0.0;
  if (metric == Metric::hamming) {
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1.0 : 0.0;
    return d;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace monsoon::kernels
