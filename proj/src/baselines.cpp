#include "monsoon/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "monsoon/gibbs.hpp"
#include "monsoon/rng.hpp"

namespace monsoon {

const char* to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::spect_euclid: return "spect_euclid";
    case ClusterMethod::spect_hamming: return "spect_hamming";
    case ClusterMethod::mrf: return "mrf";
  }
  return "unknown";
}

namespace {

Matrix<double> centroids_of(const Matrix<double>& points,
                            const std::vector<int>& labels, std::size_t k,
                            std::vector<int>& sizes) {
  const std::size_t dim = points.cols();
  Matrix<double> c(k, dim, 0.0);
  sizes.assign(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    ++sizes[l];
    auto dst = c.row(l);
    const auto src = points.row(i);
    for (std::size_t j = 0; j < dim; ++j) dst[j] += src[j];
  }
  for (std::size_t l = 0; l < k; ++l) {
    if (!sizes[l]) continue;
    for (double& v : c.row(l)) v /= sizes[l];
  }
  return c;
}

double within_ss(const Matrix<double>& points, const std::vector<int>& labels,
                 const Matrix<double>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i)
    total += kernels::sq_distance(points.row(i),
                                  centroids.row(static_cast<std::size_t>(labels[i])),
                                  kernels::Metric::euclidean);
  return total;
}

Matrix<double> kmeans_pp_seed(const Matrix<double>& points, std::size_t k,
                              SplitMix64& rng) {
  const std::size_t n = points.rows();
  Matrix<double> centroids(k, points.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy(points.row(pick).begin(), points.row(pick).end(),
              centroids.row(c).begin());
    if (c + 1 == k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], kernels::sq_distance(points.row(i), centroids.row(c),
                                                   kernels::Metric::euclidean));
      total += d2[i];
    }
    if (total <= 0.0) {
      pick = rng.below(n);
      continue;
    }
    const double r = rng.uniform() * total;
    double acc = 0.0;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (r < acc && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }
  return centroids;
}

// Maps arbitrary integer labels to 0..k-1 in order of first appearance.
std::vector<int> dense_labels(const std::vector<int>& labels, std::size_t& k) {
  std::map<int, int> index;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = index.try_emplace(labels[i], static_cast<int>(index.size()));
    out[i] = it->second;
  }
  k = index.size();
  return out;
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Shared evaluation along one axis. `series(i)` gives item i's real vector,
// `binary(i, j)` its discrete vector, `totals[i]` its aggregate.
template <typename Series, typename Binary>
EvalReport evaluate_items(std::size_t n_items, std::size_t length,
                          const std::vector<int>& labels, Series series,
                          Binary binary, const std::vector<double>& totals) {
  if (labels.size() != n_items) throw DataError("evaluate: one label per item required");
  std::size_t k = 0;
  const auto dense = dense_labels(labels, k);
  Matrix<double> mean(k, length, 0.0);
  Matrix<double> wet(k, length, 0.0);
  std::vector<int> sizes(k, 0);
  std::vector<std::vector<double>> cluster_totals(k);
  for (std::size_t i = 0; i < n_items; ++i) {
    const auto c = static_cast<std::size_t>(dense[i]);
    ++sizes[c];
    cluster_totals[c].push_back(totals[i]);
    for (std::size_t j = 0; j < length; ++j) {
      mean(c, j) += series(i, j);
      wet(c, j) += binary(i, j);
    }
  }
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < length; ++j) {
      mean(c, j) /= sizes[c];
      // Majority with ties going to wet.
      wet(c, j) = 2.0 * wet(c, j) >= sizes[c] ? 1.0 : 0.0;
    }

  EvalReport r;
  for (std::size_t c = 0; c < k; ++c) r.std_yy += population_std(cluster_totals[c]);
  r.std_yy /= static_cast<double>(k);
  for (std::size_t i = 0; i < n_items; ++i) {
    const auto c = static_cast<std::size_t>(dense[i]);
    double ss = 0.0, mismatches = 0.0;
    for (std::size_t j = 0; j < length; ++j) {
      const double d = series(i, j) - mean(c, j);
      ss += d * d;
      mismatches += binary(i, j) != wet(c, j) ? 1.0 : 0.0;
    }
    r.l2_theta += std::sqrt(ss);
    r.hamm_theta_d += mismatches;
  }
  r.l2_theta /= static_cast<double>(n_items);
  r.hamm_theta_d /= static_cast<double>(n_items);
  return r;
}

}  // namespace

ClusteringResult kmeans(const Matrix<double>& vectors, int k, std::uint64_t seed,
                        int max_iter, int workers) {
  if (k < 1) throw DataError("kmeans: k must be >= 1");
  const std::size_t n = vectors.rows();
  if (static_cast<std::size_t>(k) > n) throw DataError("kmeans: k exceeds the number of items");
  const auto kk = static_cast<std::size_t>(k);

  SplitMix64 rng(seed);
  Matrix<double> centroids = kmeans_pp_seed(vectors, kk, rng);
  ClusteringResult result;
  result.k = k;
  result.method = ClusterMethod::kmeans;

  std::vector<int> labels, previous;
  std::vector<double> d2;
  std::vector<int> sizes;
  for (int iter = 0; iter < max_iter; ++iter) {
    kernels::nearest_centroid(vectors, centroids, labels, d2, workers);
    result.objective_trace.push_back(std::accumulate(d2.begin(), d2.end(), 0.0));
    if (labels == previous) break;
    previous = labels;
    centroids = centroids_of(vectors, labels, kk, sizes);
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < kk; ++c) {
      if (sizes[c]) continue;
      // Reseed at the point farthest from its own centroid.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const double d = kernels::sq_distance(
            vectors.row(i), centroids.row(static_cast<std::size_t>(labels[i])),
            kernels::Metric::euclidean);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[far] = true;
      std::copy(vectors.row(far).begin(), vectors.row(far).end(),
                centroids.row(c).begin());
    }
  }
  centroids = centroids_of(vectors, labels, kk, sizes);
  result.labels = std::move(labels);
  result.objective = within_ss(vectors, result.labels, centroids);
  return result;
}

ClusteringResult spectral_from_affinity(const Matrix<double>& affinity, int k,
                                        std::uint64_t seed) {
  const std::size_t n = affinity.rows();
  if (k < 1) throw DataError("spectral: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw DataError("spectral: k exceeds the number of items");
  ClusteringResult result;
  result.k = k;
  result.method = ClusterMethod::spect_euclid;
  if (k == 1) {
    result.labels.assign(n, 0);
    return result;
  }

  Eigen::VectorXd inv_sqrt_deg(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) deg += affinity(i, j);
    inv_sqrt_deg(static_cast<Eigen::Index>(i)) = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      if (i != j)
        laplacian(i, j) -= inv_sqrt_deg(i) *
                           affinity(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                           inv_sqrt_deg(j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw DataError("spectral: eigen-solver failed");
  const auto& vecs = solver.eigenvectors();  // eigenvalues ascending

  Matrix<double> embedding(n, static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int c = 0; c < k; ++c) {
      const double v = vecs(static_cast<Eigen::Index>(i), c);
      embedding(i, static_cast<std::size_t>(c)) = v;
      norm += v * v;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& v : embedding.row(i)) v /= norm;
    }
  }
  auto km = kmeans(embedding, k, seed);
  result.labels = std::move(km.labels);
  result.objective = km.objective;
  return result;
}

ClusteringResult spectral(const Matrix<double>& items, int k,
                          const Affinity& affinity, std::uint64_t seed,
                          int workers) {
  const std::size_t n = items.rows();
  Matrix<double> d2;
  kernels::pairwise_sq_distances(items, affinity.metric, d2, workers);
  double h = affinity.bandwidth;
  if (!(h > 0.0)) {
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) dist.push_back(std::sqrt(d2(i, j)));
    if (!dist.empty()) {
      auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
      std::nth_element(dist.begin(), mid, dist.end());
      h = *mid;
    }
    if (!(h > 0.0)) h = 1.0;
  }
  Matrix<double> a(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a(i, j) = std::exp(-d2(i, j) / (2.0 * h * h));
  auto result = spectral_from_affinity(a, k, seed);
  result.method = affinity.metric == kernels::Metric::hamming
                      ? ClusterMethod::spect_hamming
                      : ClusterMethod::spect_euclid;
  return result;
}

ClusteringResult spectral_locations(const RainfallField& field, int k,
                                    const Affinity& affinity, std::uint64_t seed,
                                    int workers) {
  Matrix<double> items(field.n_locations(), field.n_days());
  if (affinity.metric == kernels::Metric::hamming) {
    const auto z = local_mean_threshold(field);
    for (std::size_t i = 0; i < z.data().size(); ++i) items.data()[i] = z.data()[i];
  } else {
    items = field.x;
  }
  return spectral(items, k, affinity, seed, workers);
}

ClusteringResult spectral_days(const RainfallField& field, int k,
                               const Affinity& affinity, std::uint64_t seed,
                               int workers) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  Matrix<double> items(D, S);
  const bool hamming = affinity.metric == kernels::Metric::hamming;
  const auto z = hamming ? local_mean_threshold(field) : BinaryMatrix{};
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t t = 0; t < D; ++t)
      items(t, s) = hamming ? z(s, t) : field.x(s, t);
  return spectral(items, k, affinity, seed, workers);
}

EvalReport evaluate_temporal_clustering(const RainfallField& field,
                                        const std::vector<int>& labels,
                                        const BinaryMatrix& z) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  std::vector<double> totals(S, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (double v : field.x.row(s)) totals[s] += v;
  return evaluate_items(
      S, D, labels, [&](std::size_t i, std::size_t j) { return field.x(i, j); },
      [&](std::size_t i, std::size_t j) { return static_cast<double>(z(i, j)); },
      totals);
}

EvalReport evaluate_daily_clustering(const RainfallField& field,
                                     const std::vector<int>& labels,
                                     const BinaryMatrix& z) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  auto r = evaluate_items(
      D, S, labels, [&](std::size_t i, std::size_t j) { return field.x(j, i); },
      [&](std::size_t i, std::size_t j) { return static_cast<double>(z(j, i)); },
      daily_aggregate(field));
  r.self_transitions = self_transition_count(labels, field.calendar, true);
  return r;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) return std::nan("");
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

SimilaritySeries hamming_similarity_series(const RainfallField& field,
                                           const BinaryMatrix& z,
                                           const std::vector<int>& labels,
                                           const BinaryMatrix& cdp) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  if (labels.size() != D || z.rows() != S || z.cols() != D || cdp.cols() != S) {
    throw DataError("hamming_similarity_series: dimension mismatch");
  }
  const auto& cal = field.calendar;
  SimilaritySeries out;
  out.per_day.resize(D);
  out.years = cal.years();
  out.per_year_mean.assign(out.years.size(), 0.0);
  std::vector<int> per_year_n(out.years.size(), 0);
  for (std::size_t t = 0; t < D; ++t) {
    const auto label = static_cast<std::size_t>(labels[t]);
    if (label >= cdp.rows()) throw DataError("hamming_similarity_series: label without CDP");
    int mismatches = 0;
    for (std::size_t s = 0; s < S; ++s) mismatches += z(s, t) != cdp(label, s);
    out.per_day[t] = 1.0 - static_cast<double>(mismatches) / static_cast<double>(S);
    const auto season = static_cast<std::size_t>(cal.season_of(t));
    out.per_year_mean[season] += out.per_day[t];
    ++per_year_n[season];
  }
  for (std::size_t i = 0; i < out.years.size(); ++i)
    if (per_year_n[i]) out.per_year_mean[i] /= per_year_n[i];
  out.overall_mean = std::accumulate(out.per_day.begin(), out.per_day.end(), 0.0) /
                     static_cast<double>(D);
  const auto y = daily_aggregate(field);
  out.correlation_with_aggregate = pearson_correlation(out.per_day, y);
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw DataError("adjusted_rand_index: size mismatch");
  std::size_t ka = 0, kb = 0;
  const auto da = dense_labels(a, ka), db = dense_labels(b, kb);
  Matrix<double> table(ka, kb, 0.0);
  std::vector<double> rows(ka, 0.0), cols(kb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    table(static_cast<std::size_t>(da[i]), static_cast<std::size_t>(db[i])) += 1.0;
    rows[static_cast<std::size_t>(da[i])] += 1.0;
    cols[static_cast<std::size_t>(db[i])] += 1.0;
  }
  const auto pairs = [](double n) { return n * (n - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (double v : table.data()) index += pairs(v);
  for (double v : rows) sum_a += pairs(v);
  for (double v : cols) sum_b += pairs(v);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total > 0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace monsoon
