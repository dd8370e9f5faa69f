#pragma once

#include <span>
#include <vector>

#include "monsoon/csv.hpp"
#include "monsoon/grid.hpp"
#include "monsoon/matrix.hpp"

namespace monsoon {

/// Zero-inflated exponential (dry) and zero-inflated gamma (wet) emissions.
struct EmissionParams {
  double dry_rate = 1.0;        // 1/mm
  double wet_shape = 2.0;
  double wet_rate = 1.0 / 6.0;  // 1/mm
  double zero_mass_dry = 0.5;
  double zero_mass_wet = 0.05;
};

struct ModelParams {
  double j_temporal = 1.0;
  double j_spatial = 1.0;
  double lambda_ss = 1.0;
  double lambda_st = 1.0;
  EmissionParams emission;
  /// Width of the Gaussian link between U(t) and Y(t), mm/day. Values <= 0
  /// are resolved from the data by resolve_params; +inf switches the term off.
  double aggregate_sigma = 0.0;
  double eta = 9.0;
  double zeta = 9.0;
  int max_clusters_u = 10;
  int max_clusters_v = 10;

  void validate() const;
};

/// Replaces a non-positive aggregate_sigma with the population std of Y(t)
/// (1.0 when Y is constant).
ModelParams resolve_params(ModelParams params, const RainfallField& field);

csv::KeyValues to_key_values(const ModelParams& params);
/// Unknown keys are ignored; missing keys keep their defaults.
ModelParams model_params_from(const csv::KeyValues& kv);

struct LatentState {
  BinaryMatrix z;      // S x D, 1 = wet
  std::vector<int> u;  // D labels in 0..max_clusters_u-1
  std::vector<int> v;  // S labels in 0..max_clusters_v-1

  bool operator==(const LatentState&) const = default;
};

inline constexpr double kPrototypeEps = 1e-3;

struct ClusterPrototypes {
  Matrix<double> pi;    // K_u x S wet probabilities
  Matrix<double> tau;   // K_v x D wet probabilities
  std::vector<double> mu_agg;  // K_u mean Y(t)
  std::vector<int> counts_u;
  std::vector<int> counts_v;

  bool operator==(const ClusterPrototypes&) const = default;
};

/// Throws DataError unless state, field, params and prototypes agree in shape
/// and every label is within bounds.
void check_dimensions(const LatentState& state, const RainfallField& field,
                      const ModelParams& params, const ClusterPrototypes& proto);

double log_emission(double x, int z, const EmissionParams& e);

/// Unnormalised log p(Z, U, V, X). Temporal edges join consecutive days of
/// the same season; every undirected edge is counted once.
double joint_log_density(const LatentState& state, const RainfallField& field,
                         const ModelParams& params,
                         const ClusterPrototypes& proto);

/// log p(Z(s,t)=1 | rest) - log p(Z(s,t)=0 | rest).
double z_log_odds(std::size_t s, std::size_t t, const LatentState& state,
                  const RainfallField& field, const ModelParams& params,
                  const ClusterPrototypes& proto);

/// P(Z(s,t) = 1 | everything else).
double conditional_z(std::size_t s, std::size_t t, const LatentState& state,
                     const RainfallField& field, const ModelParams& params,
                     const ClusterPrototypes& proto);

/// Label-dependent part of the U(t) conditional, excluding the prior:
/// lambda_ss * sum_s log Bern(z(s,t); pi[k][s]) - (Y(t) - mu_k)^2 / (2 sigma^2).
double u_log_likelihood(std::size_t t, int k, const LatentState& state,
                        double y_t, const ModelParams& params,
                        const ClusterPrototypes& proto);

/// lambda_st * sum_t log Bern(z(s,t); tau[k][t]).
double v_log_likelihood(std::size_t s, int k, const LatentState& state,
                        const ModelParams& params,
                        const ClusterPrototypes& proto);

std::vector<double> conditional_u(std::size_t t, const LatentState& state,
                                  const RainfallField& field,
                                  const ModelParams& params,
                                  const ClusterPrototypes& proto);

std::vector<double> conditional_v(std::size_t s, const LatentState& state,
                                  const RainfallField& field,
                                  const ModelParams& params,
                                  const ClusterPrototypes& proto);

/// Empirical-Bayes prototypes for the current state.
ClusterPrototypes refresh_prototypes(const LatentState& state,
                                     const RainfallField& field,
                                     const ModelParams& params);

/// Normalises log-weights in place into probabilities. All -inf weights give
/// a uniform distribution.
void normalize_log_weights(std::span<double> log_w);

/// Inverse-CDF draw from normalised probabilities given r in [0, 1).
int sample_categorical(std::span<const double> probs, double r);

}  // namespace monsoon
