#pragma once

#include <cstdint>
#include <vector>

#include "monsoon/grid.hpp"
#include "monsoon/matrix.hpp"

namespace monsoon {

struct SynthEmission {
  double dry_mean_mm = 1.0;
  double wet_mean_mm = 12.0;
  double wet_shape = 2.0;
};

/// Planted ground truth for verification runs.
struct SynthSpec {
  int grid_rows = 8;
  int grid_cols = 8;
  int n_years = 2;
  int first_year = 2000;
  int n_patterns = 4;
  /// n_patterns x S wet probabilities.
  Matrix<double> pattern_wet_probs;
  /// n_patterns x n_patterns row-stochastic.
  Matrix<double> transition;
  SynthEmission emission;
  double flip_noise = 0.1;
  std::uint64_t seed = 1;

  /// Throws DataError on any violated invariant.
  void validate() const;
};

/// Banded layout: location s belongs to band floor(s * n_patterns / S);
/// pattern k is wet with probability `in_prob` on band k and `out_prob`
/// elsewhere. The transition matrix keeps a pattern with probability
/// `self_prob` and otherwise moves uniformly to another pattern.
SynthSpec banded_synth_spec(int rows, int cols, int n_patterns, int n_years,
                            double in_prob = 0.9, double out_prob = 0.05,
                            double self_prob = 0.8);

struct SynthResult {
  RainfallField field;
  BinaryMatrix z;
  std::vector<int> u;
  /// Dominant pattern per location (highest wet probability, lowest index on
  /// ties).
  std::vector<int> v;
};

SynthResult synth_generate(const SynthSpec& spec);

}  // namespace monsoon
