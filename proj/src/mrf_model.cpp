#include "monsoon/mrf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace monsoon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_bern(int z, double p) { return z ? std::log(p) : std::log1p(-p); }

double clamp_prob(double p) {
  return std::clamp(p, kPrototypeEps, 1.0 - kPrototypeEps);
}

double aggregate_term(double y, double mu, double sigma) {
  if (std::isinf(sigma)) return 0.0;
  const double d = y - mu;
  return -d * d / (2.0 * sigma * sigma);
}

// log of the Dirichlet-multinomial marginal of a label vector with symmetric
// concentration `alpha` split over `k` labels.
double log_label_prior(std::span<const int> labels, int k, double alpha) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  const double a = alpha / k;
  double out = std::lgamma(alpha) -
               std::lgamma(alpha + static_cast<double>(labels.size()));
  for (int c : counts) out += std::lgamma(c + a) - std::lgamma(a);
  return out;
}

double column_sum(const RainfallField& field, std::size_t t) {
  double y = 0.0;
  for (std::size_t s = 0; s < field.n_locations(); ++s) y += field.x(s, t);
  return y;
}

}  // namespace

void ModelParams::validate() const {
  if (!(j_temporal >= 0 && j_spatial >= 0 && lambda_ss >= 0 && lambda_st >= 0)) {
    throw DataError("model: couplings must be >= 0");
  }
  const auto& e = emission;
  if (!(e.dry_rate > 0 && e.wet_rate > 0 && e.wet_shape > 0)) {
    throw DataError("model: emission rates and shape must be > 0");
  }
  if (!(e.zero_mass_dry >= 0 && e.zero_mass_dry < 1 && e.zero_mass_wet >= 0 &&
        e.zero_mass_wet < 1)) {
    throw DataError("model: zero masses must lie in [0, 1)");
  }
  if (std::isnan(aggregate_sigma)) throw DataError("model: aggregate_sigma is NaN");
  if (!(eta > 0 && zeta > 0)) throw DataError("model: eta and zeta must be > 0");
  if (max_clusters_u < 1 || max_clusters_v < 1) {
    throw DataError("model: max_clusters must be >= 1");
  }
}

ModelParams resolve_params(ModelParams params, const RainfallField& field) {
  if (params.aggregate_sigma > 0) return params;
  const auto y = daily_aggregate(field);
  double sd = 0.0;
  if (!y.empty()) {
    const double mean =
        std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(y.size()));
  }
  params.aggregate_sigma = sd > 0 ? sd : 1.0;
  return params;
}

csv::KeyValues to_key_values(const ModelParams& p) {
  using csv::format;
  return {
      {"j_temporal", format(p.j_temporal)},
      {"j_spatial", format(p.j_spatial)},
      {"lambda_ss", format(p.lambda_ss)},
      {"lambda_st", format(p.lambda_st)},
      {"dry_rate", format(p.emission.dry_rate)},
      {"wet_shape", format(p.emission.wet_shape)},
      {"wet_rate", format(p.emission.wet_rate)},
      {"zero_mass_dry", format(p.emission.zero_mass_dry)},
      {"zero_mass_wet", format(p.emission.zero_mass_wet)},
      {"aggregate_sigma", format(p.aggregate_sigma)},
      {"eta", format(p.eta)},
      {"zeta", format(p.zeta)},
      {"max_clusters_u", std::to_string(p.max_clusters_u)},
      {"max_clusters_v", std::to_string(p.max_clusters_v)},
  };
}

ModelParams model_params_from(const csv::KeyValues& kv) {
  ModelParams p;
  const auto real = [&](const char* key, double& dst) {
    if (auto it = kv.find(key); it != kv.end())
      dst = csv::parse_double(it->second, key);
  };
  const auto integer = [&](const char* key, int& dst) {
    if (auto it = kv.find(key); it != kv.end())
      dst = static_cast<int>(csv::parse_long(it->second, key));
  };
  real("j_temporal", p.j_temporal);
  real("j_spatial", p.j_spatial);
  real("lambda_ss", p.lambda_ss);
  real("lambda_st", p.lambda_st);
  real("dry_rate", p.emission.dry_rate);
  real("wet_shape", p.emission.wet_shape);
  real("wet_rate", p.emission.wet_rate);
  real("zero_mass_dry", p.emission.zero_mass_dry);
  real("zero_mass_wet", p.emission.zero_mass_wet);
  real("aggregate_sigma", p.aggregate_sigma);
  real("eta", p.eta);
  real("zeta", p.zeta);
  integer("max_clusters_u", p.max_clusters_u);
  integer("max_clusters_v", p.max_clusters_v);
  p.validate();
  return p;
}

void check_dimensions(const LatentState& state, const RainfallField& field,
                      const ModelParams& params,
                      const ClusterPrototypes& proto) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  const auto Ku = static_cast<std::size_t>(params.max_clusters_u);
  const auto Kv = static_cast<std::size_t>(params.max_clusters_v);
  if (state.z.rows() != S || state.z.cols() != D || state.u.size() != D ||
      state.v.size() != S) {
    throw DataError("latent state does not match the rainfall field dimensions");
  }
  if (proto.pi.rows() != Ku || proto.pi.cols() != S || proto.tau.rows() != Kv ||
      proto.tau.cols() != D || proto.mu_agg.size() != Ku ||
      proto.counts_u.size() != Ku || proto.counts_v.size() != Kv) {
    throw DataError("prototypes do not match the model dimensions");
  }
  for (int l : state.u)
    if (l < 0 || l >= params.max_clusters_u) throw DataError("u label out of range");
  for (int l : state.v)
    if (l < 0 || l >= params.max_clusters_v) throw DataError("v label out of range");
}

double log_emission(double x, int z, const EmissionParams& e) {
  const double zero_mass = z ? e.zero_mass_wet : e.zero_mass_dry;
  if (x == 0.0 && zero_mass > 0.0) return std::log(zero_mass);
  const double log_cont = std::log1p(-zero_mass);
  if (!z) return log_cont + std::log(e.dry_rate) - e.dry_rate * x;
  if (x <= 0.0) {
    // Gamma density at 0: 0 for shape > 1, rate for shape == 1, +inf below.
    if (e.wet_shape > 1.0) return kNegInf;
    if (e.wet_shape == 1.0) return log_cont + std::log(e.wet_rate);
    return std::numeric_limits<double>::infinity();
  }
  return log_cont + e.wet_shape * std::log(e.wet_rate) +
         (e.wet_shape - 1.0) * std::log(x) - e.wet_rate * x -
         std::lgamma(e.wet_shape);
}

double joint_log_density(const LatentState& state, const RainfallField& field,
                         const ModelParams& params,
                         const ClusterPrototypes& proto) {
  check_dimensions(state, field, params, proto);
  const std::size_t S = field.n_locations(), D = field.n_days();
  const auto& cal = field.calendar;
  const auto& z = state.z;

  double total = log_label_prior(state.u, params.max_clusters_u, params.eta) +
                 log_label_prior(state.v, params.max_clusters_v, params.zeta);

  long temporal_agree = 0, spatial_agree = 0;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = 0; t + 1 < D; ++t)
      if (cal.same_season(t, t + 1) && z(s, t) == z(s, t + 1)) ++temporal_agree;
    for (int n : field.geometry.neighbors(s)) {
      const auto sn = static_cast<std::size_t>(n);
      if (sn <= s) continue;
      for (std::size_t t = 0; t < D; ++t)
        if (z(s, t) == z(sn, t)) ++spatial_agree;
    }
  }
  total += params.j_temporal * static_cast<double>(temporal_agree) +
           params.j_spatial * static_cast<double>(spatial_agree);

  double link_st = 0.0, link_ss = 0.0, emission = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const auto v = static_cast<std::size_t>(state.v[s]);
    for (std::size_t t = 0; t < D; ++t) {
      const int zz = z(s, t);
      link_st += log_bern(zz, proto.tau(v, t));
      link_ss += log_bern(zz, proto.pi(static_cast<std::size_t>(state.u[t]), s));
      emission += log_emission(field.x(s, t), zz, params.emission);
    }
  }
  total += params.lambda_st * link_st + params.lambda_ss * link_ss + emission;

  for (std::size_t t = 0; t < D; ++t) {
    total += aggregate_term(column_sum(field, t),
                            proto.mu_agg[static_cast<std::size_t>(state.u[t])],
                            params.aggregate_sigma);
  }
  return total;
}

double z_log_odds(std::size_t s, std::size_t t, const LatentState& state,
                  const RainfallField& field, const ModelParams& params,
                  const ClusterPrototypes& proto) {
  const auto& z = state.z;
  const auto& cal = field.calendar;
  const std::size_t D = field.n_days();

  int balance_t = 0;  // wet neighbours minus dry neighbours
  if (t > 0 && cal.same_season(t - 1, t)) balance_t += z(s, t - 1) ? 1 : -1;
  if (t + 1 < D && cal.same_season(t, t + 1)) balance_t += z(s, t + 1) ? 1 : -1;
  int balance_s = 0;
  for (int n : field.geometry.neighbors(s))
    balance_s += z(static_cast<std::size_t>(n), t) ? 1 : -1;

  const double pi = proto.pi(static_cast<std::size_t>(state.u[t]), s);
  const double tau = proto.tau(static_cast<std::size_t>(state.v[s]), t);
  double odds = params.j_temporal * balance_t + params.j_spatial * balance_s +
                params.lambda_ss * (std::log(pi) - std::log1p(-pi)) +
                params.lambda_st * (std::log(tau) - std::log1p(-tau));

  const double wet = log_emission(field.x(s, t), 1, params.emission);
  const double dry = log_emission(field.x(s, t), 0, params.emission);
  if (!(wet == kNegInf && dry == kNegInf)) odds += wet - dry;
  return odds;
}

double conditional_z(std::size_t s, std::size_t t, const LatentState& state,
                     const RainfallField& field, const ModelParams& params,
                     const ClusterPrototypes& proto) {
  const double lo = z_log_odds(s, t, state, field, params, proto);
  if (lo >= 0) return 1.0 / (1.0 + std::exp(-lo));
  const double e = std::exp(lo);
  return e / (1.0 + e);
}

double u_log_likelihood(std::size_t t, int k, const LatentState& state,
                        double y_t, const ModelParams& params,
                        const ClusterPrototypes& proto) {
  const auto kk = static_cast<std::size_t>(k);
  double ll = 0.0;
  if (params.lambda_ss != 0.0) {
    const auto pi = proto.pi.row(kk);
    for (std::size_t s = 0; s < pi.size(); ++s) ll += log_bern(state.z(s, t), pi[s]);
    ll *= params.lambda_ss;
  }
  return ll + aggregate_term(y_t, proto.mu_agg[kk], params.aggregate_sigma);
}

double v_log_likelihood(std::size_t s, int k, const LatentState& state,
                        const ModelParams& params,
                        const ClusterPrototypes& proto) {
  if (params.lambda_st == 0.0) return 0.0;
  const auto tau = proto.tau.row(static_cast<std::size_t>(k));
  const auto z = state.z.row(s);
  double ll = 0.0;
  for (std::size_t t = 0; t < tau.size(); ++t) ll += log_bern(z[t], tau[t]);
  return params.lambda_st * ll;
}

std::vector<double> conditional_u(std::size_t t, const LatentState& state,
                                  const RainfallField& field,
                                  const ModelParams& params,
                                  const ClusterPrototypes& proto) {
  const int K = params.max_clusters_u;
  const double y_t = column_sum(field, t);
  const double a = params.eta / K;
  std::vector<double> w(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double others = proto.counts_u[static_cast<std::size_t>(k)] -
                          (state.u[t] == k ? 1 : 0);
    w[static_cast<std::size_t>(k)] =
        std::log(others + a) + u_log_likelihood(t, k, state, y_t, params, proto);
  }
  normalize_log_weights(w);
  return w;
}

std::vector<double> conditional_v(std::size_t s, const LatentState& state,
                                  const RainfallField& /*field*/,
                                  const ModelParams& params,
                                  const ClusterPrototypes& proto) {
  const int K = params.max_clusters_v;
  const double a = params.zeta / K;
  std::vector<double> w(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double others = proto.counts_v[static_cast<std::size_t>(k)] -
                          (state.v[s] == k ? 1 : 0);
    w[static_cast<std::size_t>(k)] =
        std::log(others + a) + v_log_likelihood(s, k, state, params, proto);
  }
  normalize_log_weights(w);
  return w;
}

ClusterPrototypes refresh_prototypes(const LatentState& state,
                                     const RainfallField& field,
                                     const ModelParams& params) {
  const std::size_t S = field.n_locations(), D = field.n_days();
  const auto Ku = static_cast<std::size_t>(params.max_clusters_u);
  const auto Kv = static_cast<std::size_t>(params.max_clusters_v);
  const auto y = daily_aggregate(field);
  const double y_mean =
      D ? std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(D) : 0.0;

  ClusterPrototypes p;
  p.counts_u.assign(Ku, 0);
  p.counts_v.assign(Kv, 0);
  for (int l : state.u) ++p.counts_u[static_cast<std::size_t>(l)];
  for (int l : state.v) ++p.counts_v[static_cast<std::size_t>(l)];

  p.pi = Matrix<double>(Ku, S, 0.0);
  std::vector<double> y_sum(Ku, 0.0);
  for (std::size_t t = 0; t < D; ++t) {
    const auto k = static_cast<std::size_t>(state.u[t]);
    y_sum[k] += y[t];
    for (std::size_t s = 0; s < S; ++s) p.pi(k, s) += state.z(s, t);
  }
  p.mu_agg.assign(Ku, y_mean);
  for (std::size_t k = 0; k < Ku; ++k) {
    const int n = p.counts_u[k];
    for (std::size_t s = 0; s < S; ++s)
      p.pi(k, s) = n ? clamp_prob(p.pi(k, s) / n) : 0.5;
    if (n) p.mu_agg[k] = y_sum[k] / n;
  }

  p.tau = Matrix<double>(Kv, D, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const auto k = static_cast<std::size_t>(state.v[s]);
    const auto z = state.z.row(s);
    auto tau = p.tau.row(k);
    for (std::size_t t = 0; t < D; ++t) tau[t] += z[t];
  }
  for (std::size_t k = 0; k < Kv; ++k) {
    const int n = p.counts_v[k];
    for (std::size_t t = 0; t < D; ++t)
      p.tau(k, t) = n ? clamp_prob(p.tau(k, t) / n) : 0.5;
  }
  return p;
}

void normalize_log_weights(std::span<double> log_w) {
  if (log_w.empty()) return;
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (top == kNegInf) {
    std::fill(log_w.begin(), log_w.end(), 1.0 / static_cast<double>(log_w.size()));
    return;
  }
  double sum = 0.0;
  for (double& w : log_w) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : log_w) w /= sum;
}

int sample_categorical(std::span<const double> probs, double r) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (r < acc) return static_cast<int>(k);
  }
  // Skip trailing zero-probability labels left by rounding in acc.
  std::size_t k = probs.size() - 1;
  while (k > 0 && probs[k] == 0.0) --k;
  return static_cast<int>(k);
}

}  // namespace monsoon
