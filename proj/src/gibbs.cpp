#include "monsoon/gibbs.hpp"

#include <cmath>
#include <limits>

#include "monsoon/baselines.hpp"
#include "monsoon/csv.hpp"
#include "monsoon/kernels.hpp"
#include "monsoon/rng.hpp"

namespace monsoon {

void SamplerConfig::validate() const {
  if (n_sweeps < 1) throw DataError("sampler: n_sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= n_sweeps) {
    throw DataError("sampler: burn_in must satisfy 0 <= burn_in < n_sweeps");
  }
  if (worker_count < 1) throw DataError("sampler: worker_count must be >= 1");
  if (init == InitMode::given && !given) {
    throw DataError("sampler: init=given needs a state");
  }
}

std::vector<double> SamplerResult::log_density_trace() const {
  std::vector<double> out;
  out.reserve(sweeps.size());
  for (const auto& s : sweeps) out.push_back(s.log_density);
  return out;
}

BinaryMatrix local_mean_threshold(const RainfallField& field) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  BinaryMatrix z(S, D, 0);
  for (std::size_t s = 0; s < S; ++s) {
    const auto row = field.x.row(s);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(D);
    for (std::size_t t = 0; t < D; ++t) z(s, t) = row[t] > mean ? 1 : 0;
  }
  return z;
}

namespace {

Matrix<double> binary_rows(const BinaryMatrix& z) {
  Matrix<double> out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.data().size(); ++i) out.data()[i] = z.data()[i];
  return out;
}

Matrix<double> binary_columns(const BinaryMatrix& z) {
  Matrix<double> out(z.cols(), z.rows());
  for (std::size_t s = 0; s < z.rows(); ++s)
    for (std::size_t t = 0; t < z.cols(); ++t) out(t, s) = z(s, t);
  return out;
}

// Resamples one block of labels in sequence. The likelihood table is fixed
// for the block; only the occupancy counts change as labels move.
long resample_labels(std::vector<int>& labels, std::vector<int> counts,
                     const Matrix<double>& loglik, double concentration,
                     std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t sweep) {
  const std::size_t K = counts.size();
  const double a = concentration / static_cast<double>(K);
  std::vector<double> w(K);
  long changed = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto old = static_cast<std::size_t>(labels[i]);
    --counts[old];
    for (std::size_t k = 0; k < K; ++k)
      w[k] = std::log(counts[k] + a) + loglik(i, k);
    normalize_log_weights(w);
    const int next = sample_categorical(w, counter_uniform(seed, stream, sweep, i));
    ++counts[static_cast<std::size_t>(next)];
    changed += next != labels[i];
    labels[i] = next;
  }
  return changed;
}

}  // namespace

std::pair<LatentState, ClusterPrototypes> initialize(const RainfallField& field,
                                                     const ModelParams& params,
                                                     const SamplerConfig& config) {
  config.validate();
  params.validate();
  const std::size_t S = field.n_locations(), D = field.n_days();
  LatentState state;
  switch (config.init) {
    case InitMode::given:
      state = *config.given;
      break;
    case InitMode::random: {
      state.z = BinaryMatrix(S, D, 0);
      for (std::size_t i = 0; i < S * D; ++i)
        state.z.data()[i] =
            counter_uniform(config.seed, kernels::kStreamInit, 0, i) < 0.5 ? 1 : 0;
      state.u.resize(D);
      state.v.resize(S);
      for (std::size_t t = 0; t < D; ++t)
        state.u[t] = static_cast<int>(
            counter_bits(config.seed, kernels::kStreamInit, 1, t) %
            static_cast<std::uint64_t>(params.max_clusters_u));
      for (std::size_t s = 0; s < S; ++s)
        state.v[s] = static_cast<int>(
            counter_bits(config.seed, kernels::kStreamInit, 2, s) %
            static_cast<std::uint64_t>(params.max_clusters_v));
      break;
    }
    case InitMode::threshold_local_mean: {
      state.z = local_mean_threshold(field);
      const int ku = std::min<int>(params.max_clusters_u, static_cast<int>(D));
      const int kv = std::min<int>(params.max_clusters_v, static_cast<int>(S));
      state.u = kmeans(binary_columns(state.z), ku, config.seed, 300,
                       config.worker_count)
                    .labels;
      state.v = kmeans(binary_rows(state.z), kv, mix64(config.seed), 300,
                       config.worker_count)
                    .labels;
      break;
    }
  }
  auto proto = refresh_prototypes(state, field, params);
  check_dimensions(state, field, params, proto);
  return {std::move(state), std::move(proto)};
}

SamplerResult run(const RainfallField& field, const ModelParams& params,
                  const SamplerConfig& config) {
  if (!(params.aggregate_sigma > 0)) {
    throw DataError("sampler: aggregate_sigma must be resolved before sampling");
  }
  auto [state, proto] = initialize(field, params, config);
  const auto y = daily_aggregate(field);
  const int workers = config.worker_count;

  SamplerResult result;
  result.sweeps.reserve(static_cast<std::size_t>(config.n_sweeps));
  result.map_trace.reserve(static_cast<std::size_t>(config.n_sweeps));
  double best = -std::numeric_limits<double>::infinity();
  bool have_map = false;
  Matrix<double> table;

  for (int sweep = 0; sweep < config.n_sweeps; ++sweep) {
    const kernels::SweepKey key{config.seed, static_cast<std::uint64_t>(sweep)};
    SweepStats stats;
    stats.changed_z = kernels::z_half_sweep(state, field, params, proto, 0, key, workers) +
                      kernels::z_half_sweep(state, field, params, proto, 1, key, workers);

    kernels::u_log_likelihood_table(state, y, params, proto, table, workers);
    stats.changed_u = resample_labels(state.u, proto.counts_u, table, params.eta,
                                      config.seed, kernels::kStreamU, key.sweep);

    kernels::v_log_likelihood_table(state, params, proto, table, workers);
    stats.changed_v = resample_labels(state.v, proto.counts_v, table, params.zeta,
                                      config.seed, kernels::kStreamV, key.sweep);

    proto = refresh_prototypes(state, field, params);
    stats.log_density = joint_log_density(state, field, params, proto);
    result.sweeps.push_back(stats);

    if (config.track_map && sweep >= config.burn_in &&
        (!have_map || stats.log_density > best)) {
      best = stats.log_density;
      have_map = true;
      result.map_state = state;
      result.map_prototypes = proto;
    }
    result.map_trace.push_back(best);
  }

  result.final_state = std::move(state);
  result.final_prototypes = std::move(proto);
  if (!config.track_map) {
    result.map_state = result.final_state;
    result.map_prototypes = result.final_prototypes;
    best = result.sweeps.back().log_density;
  }
  result.map_log_density = best;
  return result;
}

long self_transition_count(std::span<const int> u, const CalendarIndex& calendar,
                           bool include_cross_season) {
  long count = 0;
  for (std::size_t t = 0; t + 1 < u.size(); ++t) {
    if (!include_cross_season && !calendar.same_season(t, t + 1)) continue;
    if (u[t] == u[t + 1]) ++count;
  }
  return count;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const SamplerResult& result, const std::string& stamp) {
  auto out = csv::open_output(path, stamp);
  out << "sweep,log_density,changed_z,changed_u,changed_v\n";
  for (std::size_t i = 0; i < result.sweeps.size(); ++i) {
    const auto& s = result.sweeps[i];
    out << i << ',' << csv::format(s.log_density) << ',' << s.changed_z << ','
        << s.changed_u << ',' << s.changed_v << '\n';
  }
}

}  // namespace monsoon
