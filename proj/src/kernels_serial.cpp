#include "monsoon/kernels.hpp"
#include "monsoon/rng.hpp"

namespace monsoon::kernels {

namespace serial {

long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  long changed = 0;
  for (std::size_t s = 0; s < S; ++s) {
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
                            const ClusterPrototypes& proto,
                            Matrix<double>& out) {
  const std::size_t D = state.u.size();
  const int K = params.max_clusters_u;
  out = Matrix<double>(D, static_cast<std::size_t>(K));
  for (std::size_t t = 0; t < D; ++t)
    for (int k = 0; k < K; ++k)
      out(t, static_cast<std::size_t>(k)) =
          monsoon::u_log_likelihood(t, k, state, y[t], params, proto);
}

void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto,
                            Matrix<double>& out) {
  const std::size_t S = state.v.size();
  const int K = params.max_clusters_v;
  out = Matrix<double>(S, static_cast<std::size_t>(K));
  for (std::size_t s = 0; s < S; ++s)
    for (int k = 0; k < K; ++k)
      out(s, static_cast<std::size_t>(k)) =
          monsoon::v_log_likelihood(s, k, state, params, proto);
}

void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out) {
  const std::size_t n = items.rows();
  out = Matrix<double>(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = sq_distance(items.row(i), items.row(j), metric);
      out(i, j) = d;
      out(j, i) = d;
    }
}

void nearest_centroid(const Matrix<double>& points,
                      const Matrix<double>& centroids, std::vector<int>& labels,
                      std::vector<double>& sq_dist) {
  const std::size_t n = points.rows(), k = centroids.rows();
  labels.assign(n, 0);
  sq_dist.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
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

}  // namespace serial

long z_half_sweep(LatentState& state, const RainfallField& field,
                  const ModelParams& params, const ClusterPrototypes& proto,
                  int color, SweepKey key, int workers) {
  return workers <= 1
             ? serial::z_half_sweep(state, field, params, proto, color, key)
             : omp::z_half_sweep(state, field, params, proto, color, key, workers);
}

void u_log_likelihood_table(const LatentState& state, const std::vector<double>& y,
                            const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers) {
  if (workers <= 1) serial::u_log_likelihood_table(state, y, params, proto, out);
  else omp::u_log_likelihood_table(state, y, params, proto, out, workers);
}

void v_log_likelihood_table(const LatentState& state, const ModelParams& params,
                            const ClusterPrototypes& proto, Matrix<double>& out,
                            int workers) {
  if (workers <= 1) serial::v_log_likelihood_table(state, params, proto, out);
  else omp::v_log_likelihood_table(state, params, proto, out, workers);
}

void pairwise_sq_distances(const Matrix<double>& items, Metric metric,
                           Matrix<double>& out, int workers) {
  if (workers <= 1) serial::pairwise_sq_distances(items, metric, out);
  else omp::pairwise_sq_distances(items, metric, out, workers);
}

void nearest_centroid(const Matrix<double>& points, const Matrix<double>& centroids,
                      std::vector<int>& labels, std::vector<double>& sq_dist,
                      int workers) {
  if (workers <= 1) serial::nearest_centroid(points, centroids, labels, sq_dist);
  else omp::nearest_centroid(points, centroids, labels, sq_dist, workers);
}

}  // namespace monsoon::kernels
