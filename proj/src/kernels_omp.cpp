#include <omp.h>

#include "monsoon/kernels.hpp"
#include "monsoon/rng.hpp"

namespace monsoon::kernels::omp {

long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key, int workers) {
  const auto S = static_cast<long>(field.n_locations());
  const std::size_t D = field.n_days();
  long changed = 0;
  // Sites of one color only read sites of the other color.
#pragma omp parallel for num_threads(workers) schedule(static) reduction(+ : changed)
  for (long si = 0; si < S; ++si) {
    const auto s = static_cast<std::size_t>(si);
    const std::size_t t0 = static_cast<std::size_t>((color ^ field.geometry.parity(s)) & 1);
    for (std::size_t t = t0; t < D; t += 2) {
      const double p = conditional_z(s, t, state, field, params, proto);
      const double r = counter_uniform(key.seed, kStreamZ, key.sweep, s * D + t);
      const unsigned char next = r < p ? 1 : 0;
      changed += next != state.z(s, t);
      state.z(s, t) = next;
    }
  }
  return changed;
}

void u_log_likelihood_table(const LatentState& state,
                            const std::vector<double>& y,
                            const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers) {
  const auto D = static_cast<long>(state.u.size());
  const int K = params.max_clusters_u;
  out = Matrix<double>(static_cast<std::size_t>(D), static_cast<std::size_t>(K));
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long ti = 0; ti < D; ++ti) {
    const auto t = static_cast<std::size_t>(ti);
    for (int k = 0; k < K; ++k)
      out(t, static_cast<std::size_t>(k)) =
          monsoon::u_log_likelihood(t, k, state, y[t], params, proto);
  }
}

void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers) {
  const auto S = static_cast<long>(state.v.size());
  const int K = params.max_clusters_v;
  out = Matrix<double>(static_cast<std::size_t>(S), static_cast<std::size_t>(K));
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long si = 0; si < S; ++si) {
    const auto s = static_cast<std::size_t>(si);
    for (int k = 0; k < K; ++k)
      out(s, static_cast<std::size_t>(k)) =
          monsoon::v_log_likelihood(s, k, state, params, proto);
  }
}

void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out, int workers) {
  const auto n = static_cast<long>(items.rows());
  out = Matrix<double>(items.rows(), items.rows(), 0.0);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8)
  for (long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i + 1; j < items.rows(); ++j) {
      const double d = sq_distance(items.row(i), items.row(j), metric);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
}

void nearest_centroid(const Matrix<double>& points,
                      const Matrix<double>& centroids, std::vector<int>& labels,
                      std::vector<double>& sq_dist, int workers) {
  const auto n = static_cast<long>(points.rows());
  const std::size_t k = centroids.rows();
  labels.assign(points.rows(), 0);
  sq_dist.assign(points.rows(), 0.0);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double best = sq_distance(points.row(i), centroids.row(0), Metric::euclidean);
    int best_k = 0;
    for (std::size_t c = 1; c < k; ++c) {
      const double d = sq_distance(points.row(i), centroids.row(c), Metric::euclidean);
      if (d < best) {
        best = d;
        best_k = static_cast<int>(c);
      }
    }
    labels[i] = best_k;
    sq_dist[i] = best;
  }
}

}  // namespace monsoon::kernels::omp
