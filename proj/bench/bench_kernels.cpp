// Serial vs OpenMP timings for the sampler and clustering kernels.
// usage: bench_kernels [rows cols years workers reps]
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <functional>

#include "monsoon/gibbs.hpp"
#include "monsoon/kernels.hpp"
#include "monsoon/synth.hpp"

using namespace monsoon;

static double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = omp_get_wtime();
    f();
    const double dt = omp_get_wtime() - t0;
    if (dt < best) best = dt;
  }
  return best;
}

int main(int argc, char** argv) {
  const int rows = argc > 1 ? std::atoi(argv[1]) : 20;
  const int cols = argc > 2 ? std::atoi(argv[2]) : 20;
  const int years = argc > 3 ? std::atoi(argv[3]) : 4;
  const int workers = argc > 4 ? std::atoi(argv[4]) : omp_get_max_threads();
  const int reps = argc > 5 ? std::atoi(argv[5]) : 5;

  auto spec = banded_synth_spec(rows, cols, 4, years);
  const auto synth = synth_generate(spec);
  const auto& field = synth.field;
  auto params = resolve_params(ModelParams{}, field);
  SamplerConfig cfg;
  cfg.seed = 7;
  auto [state, proto] = initialize(field, params, cfg);
  const auto y = daily_aggregate(field);
  const std::size_t S = field.n_locations(), D = field.n_days();

  std::printf("grid %dx%d, %zu days, workers %d (max %d)\n", rows, cols, D, workers,
              omp_get_max_threads());
  std::printf("%-24s %12s %12s %8s\n", "kernel", "serial[s]", "omp[s]", "speedup");
  auto report = [&](const char* name, double ts, double tp) {
    std::printf("%-24s %12.6f %12.6f %8.2f\n", name, ts, tp, ts / tp);
  };

  {
    LatentState a = state, b = state;
    const double ts = best_of(reps, [&] {
      kernels::serial::z_half_sweep(a, field, params, proto, 0, {7, 1});
    });
    const double tp = best_of(reps, [&] {
      kernels::omp::z_half_sweep(b, field, params, proto, 0, {7, 1}, workers);
    });
    report("z_half_sweep", ts, tp);
  }
  {
    Matrix<double> out(D, static_cast<std::size_t>(params.max_clusters_u));
    const double ts = best_of(reps, [&] {
      kernels::serial::u_log_likelihood_table(state, y, params, proto, out);
    });
    const double tp = best_of(reps, [&] {
      kernels::omp::u_log_likelihood_table(state, y, params, proto, out, workers);
    });
    report("u_log_likelihood_table", ts, tp);
  }
  {
    Matrix<double> out(S, static_cast<std::size_t>(params.max_clusters_v));
    const double ts = best_of(reps, [&] {
      kernels::serial::v_log_likelihood_table(state, params, proto, out);
    });
    const double tp = best_of(reps, [&] {
      kernels::omp::v_log_likelihood_table(state, params, proto, out, workers);
    });
    report("v_log_likelihood_table", ts, tp);
  }
  {
    Matrix<double> items(D, S);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t t = 0; t < D; ++t) items(t, s) = field.x(s, t);
    Matrix<double> out;
    const double ts = best_of(reps, [&] {
      kernels::serial::pairwise_sq_distances(items, kernels::Metric::euclidean, out);
    });
    const double tp = best_of(reps, [&] {
      kernels::omp::pairwise_sq_distances(items, kernels::Metric::euclidean, out, workers);
    });
    report("pairwise_sq_distances", ts, tp);

    Matrix<double> centroids(8, S);
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t s = 0; s < S; ++s) centroids(c, s) = items(c * (D / 8), s);
    std::vector<int> labels;
    std::vector<double> dist;
    const double ts2 = best_of(reps, [&] {
      kernels::serial::nearest_centroid(items, centroids, labels, dist);
    });
    const double tp2 = best_of(reps, [&] {
      kernels::omp::nearest_centroid(items, centroids, labels, dist, workers);
    });
    report("nearest_centroid", ts2, tp2);
  }
  return 0;
}
