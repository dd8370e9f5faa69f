#include "monsoon/synth.hpp"

#include <cmath>
#include <random>

#include "monsoon/rng.hpp"

namespace monsoon {

void SynthSpec::validate() const {
  if (grid_rows < 1 || grid_cols < 1) throw DataError("synth: grid must be at least 1x1");
  if (n_years < 1) throw DataError("synth: n_years must be >= 1");
  if (n_patterns < 1) throw DataError("synth: n_patterns must be >= 1");
  const auto S = static_cast<std::size_t>(grid_rows) * grid_cols;
  const auto K = static_cast<std::size_t>(n_patterns);
  if (pattern_wet_probs.rows() != K || pattern_wet_probs.cols() != S) {
    throw DataError("synth: pattern_wet_probs must be n_patterns x S");
  }
  for (double p : pattern_wet_probs.data()) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("synth: wet probabilities must lie in [0,1]");
  }
  if (transition.rows() != K || transition.cols() != K) {
    throw DataError("synth: transition must be n_patterns x n_patterns");
  }
  for (std::size_t i = 0; i < K; ++i) {
    double sum = 0.0;
    for (double p : transition.row(i)) {
      if (!(p >= 0.0)) throw DataError("synth: transition entries must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw DataError("synth: transition row " + std::to_string(i) +
                      " sums to " + std::to_string(sum));
    }
  }
  if (!(flip_noise >= 0.0 && flip_noise < 0.5)) {
    throw DataError("synth: flip_noise must satisfy 0 <= flip_noise < 0.5");
  }
  if (!(emission.dry_mean_mm > 0.0 && emission.wet_mean_mm > 0.0 &&
        emission.wet_shape > 0.0)) {
    throw DataError("synth: emission means and shape must be positive");
  }
}

SynthSpec banded_synth_spec(int rows, int cols, int n_patterns, int n_years,
                            double in_prob, double out_prob,
                            double self_prob) {
  SynthSpec spec;
  spec.grid_rows = rows;
  spec.grid_cols = cols;
  spec.n_years = n_years;
  spec.n_patterns = n_patterns;
  const auto S = static_cast<std::size_t>(rows) * cols;
  const auto K = static_cast<std::size_t>(n_patterns);
  spec.pattern_wet_probs = Matrix<double>(K, S, out_prob);
  for (std::size_t s = 0; s < S; ++s)
    spec.pattern_wet_probs(s * K / S, s) = in_prob;
  spec.transition = Matrix<double>(K, K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    if (K == 1) {
      spec.transition(i, i) = 1.0;
      continue;
    }
    const double other = (1.0 - self_prob) / static_cast<double>(K - 1);
    for (std::size_t j = 0; j < K; ++j)
      spec.transition(i, j) = i == j ? self_prob : other;
    // Absorb rounding into the diagonal so rows sum to 1 within 1e-12.
    double sum = 0.0;
    for (std::size_t j = 0; j < K; ++j)
      if (j != i) sum += spec.transition(i, j);
    spec.transition(i, i) = 1.0 - sum;
  }
  return spec;
}

SynthResult synth_generate(const SynthSpec& spec) {
  spec.validate();
  const auto S = static_cast<std::size_t>(spec.grid_rows) * spec.grid_cols;
  const auto K = static_cast<std::size_t>(spec.n_patterns);

  SynthResult out;
  out.field.geometry = GridGeometry::lattice(spec.grid_rows, spec.grid_cols);
  out.field.calendar = CalendarIndex::monsoon_seasons(spec.first_year, spec.n_years);
  const std::size_t D = out.field.calendar.size();
  out.field.x = Matrix<double>(S, D, 0.0);
  out.z = BinaryMatrix(S, D, 0);
  out.u.assign(D, 0);

  SplitMix64 rng(spec.seed);
  const auto categorical = [&](std::span<const double> probs) {
    const double r = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (r < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size() - 1);
  };

  const std::vector<double> uniform(K, 1.0 / static_cast<double>(K));
  for (std::size_t t = 0; t < D; ++t) {
    const bool season_start = t == 0 || !out.field.calendar.same_season(t - 1, t);
    out.u[t] = season_start
                   ? categorical(uniform)
                   : categorical(spec.transition.row(static_cast<std::size_t>(out.u[t - 1])));
  }

  std::exponential_distribution<double> dry(1.0 / spec.emission.dry_mean_mm);
  std::gamma_distribution<double> wet(
      spec.emission.wet_shape, spec.emission.wet_mean_mm / spec.emission.wet_shape);
  for (std::size_t t = 0; t < D; ++t) {
    const auto probs = spec.pattern_wet_probs.row(static_cast<std::size_t>(out.u[t]));
    for (std::size_t s = 0; s < S; ++s) {
      bool wet_state = rng.uniform() < probs[s];
      if (rng.uniform() < spec.flip_noise) wet_state = !wet_state;
      out.z(s, t) = wet_state ? 1 : 0;
      out.field.x(s, t) = wet_state ? wet(rng) : dry(rng);
    }
  }

  out.v.assign(S, 0);
  for (std::size_t s = 0; s < S; ++s) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
      if (spec.pattern_wet_probs(k, s) > spec.pattern_wet_probs(best, s)) best = k;
    out.v[s] = static_cast<int>(best);
  }
  return out;
}

}  // namespace monsoon
